#pragma once

// Run configuration for qlgsim: a flat JSON object per subcommand, checked
// against a fixed key schema, with defaults filled in.

#include "json.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace qlgsim {

using Json = nlohmann::ordered_json;

/// Rejected configuration; `key` names the offending entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what);
    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

const std::vector<std::string>& command_names();

Json load_config_file(const std::string& path);

/// `key=value` with the value parsed as JSON, falling back to a bare string.
/// Dotted keys address nested objects (theta_range.count=10).
void apply_override(Json& cfg, const std::string& assignment);

/// Checks every key against the command's schema and returns the config with
/// defaults filled in, keys in schema order. compare-analytic also accepts a
/// simulate1d config and relabels it.
Json resolve_config(const std::string& command, Json cfg);

// Typed access to a resolved config.
int get_int(const Json& cfg, const std::string& key);
double get_real(const Json& cfg, const std::string& key);
std::string get_text(const Json& cfg, const std::string& key);
std::vector<int> get_int_list(const Json& cfg, const std::string& key);
std::vector<std::string> get_text_list(const Json& cfg, const std::string& key);

/// A number, or a multiple of pi written as "pi", "pi/3", "2*pi/5", "0.5*pi".
double parse_angle(const Json& value, const std::string& key);
double get_angle(const Json& cfg, const std::string& key);

/// Theta grid from `thetas` or from `theta_range` {start, stop, count}.
std::vector<double> get_thetas(const Json& cfg);

} // namespace qlgsim
