#include "config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>
#include <regex>
#include <sstream>

namespace qlgsim {

ConfigError::ConfigError(std::string key, const std::string& what)
    : std::runtime_error("key '" + key + "': " + what), key_(std::move(key))
{
}

namespace {

enum class Kind { Int, Real, Angle, Text, Choice, IntList, AngleList, ChoiceList, Range };

// Defaults that depend on other keys.
enum class Derived { None, RunId, LxFromNx, EveryFromSteps };

struct KeySpec {
    KeySpec(std::string name, Kind kind, Json fallback = nullptr, std::optional<double> min = {})
        : name(std::move(name)), kind(kind), fallback(std::move(fallback)), min(min)
    {
    }

    std::string name;
    Kind kind;
    Json fallback;                     // null: required unless derived
    std::optional<double> min;         // inclusive lower bound on numbers
    bool positive = false;             // strict > 0
    std::vector<std::string> choices;  // Choice and ChoiceList
    Derived derived = Derived::None;
    bool optional = false;             // may be absent with no default
};

const std::vector<std::string> kVelocitySets{"axis_symmetric", "diagonal_symmetric", "orthogonal", "triangular"};

KeySpec int_key(std::string name, Json fallback, int min)
{
    return {std::move(name), Kind::Int, std::move(fallback), static_cast<double>(min)};
}

KeySpec real_key(std::string name, Json fallback, bool positive = false, std::optional<double> min = {})
{
    KeySpec k{std::move(name), Kind::Real, std::move(fallback), min};
    k.positive = positive;
    return k;
}

KeySpec choice_key(std::string name, std::string fallback, std::vector<std::string> choices)
{
    KeySpec k{std::move(name), Kind::Choice, Json(std::move(fallback))};
    k.choices = std::move(choices);
    return k;
}

KeySpec derived(KeySpec k, Derived d)
{
    k.derived = d;
    return k;
}

std::vector<KeySpec> common_keys()
{
    return {{"command", Kind::Text, nullptr}, derived({"run_id", Kind::Text, nullptr}, Derived::RunId)};
}

std::vector<KeySpec> collision_keys(bool with_theta = true)
{
    std::vector<KeySpec> k;
    if (with_theta)
        k.push_back({"theta", Kind::Angle, nullptr});
    k.push_back({"zeta", Kind::Angle, 0.0});
    k.push_back({"xi", Kind::Angle, 0.0});
    return k;
}

std::vector<KeySpec> option_keys()
{
    return {choice_key("streaming", "along", {"along", "against"}),
            choice_key("collision_path", "closed_form", {"closed_form", "quantum"}),
            choice_key("init", "equilibrium", {"equilibrium", "symmetric"})};
}

std::vector<KeySpec> grid1d_keys()
{
    return {int_key("nx", 64, 2), derived(real_key("lx", nullptr, true), Derived::LxFromNx)};
}

std::vector<KeySpec> grid2d_keys(bool with_set = true)
{
    std::vector<KeySpec> k{int_key("nx", 64, 2), int_key("ny", 64, 2), real_key("ds", 1.0, true)};
    if (with_set)
        k.push_back(choice_key("velocity_set", "axis_symmetric", kVelocitySets));
    return k;
}

std::vector<KeySpec> density_keys(double rho_a)
{
    return {real_key("rho_b", 1.0), real_key("rho_a", rho_a, false, 0.0)};
}

std::vector<KeySpec> time_keys()
{
    return {int_key("steps", nullptr, 0), derived(int_key("output_every", nullptr, 1), Derived::EveryFromSteps)};
}

std::vector<KeySpec> theta_grid_keys()
{
    KeySpec list{"thetas", Kind::AngleList, nullptr};
    list.optional = true;
    KeySpec range{"theta_range", Kind::Range, nullptr};
    range.optional = true;
    return {list, range};
}

template <class... Groups>
std::vector<KeySpec> join(Groups&&... groups)
{
    std::vector<KeySpec> out;
    (out.insert(out.end(), groups.begin(), groups.end()), ...);
    return out;
}

std::vector<KeySpec> schema_for(const std::string& command)
{
    const auto nu_variant = choice_key("nu_variant", "corrected", {"corrected", "yepez"});
    const auto substeps = int_key("substeps", 0, 0);
    const auto l_trunc = int_key("l_trunc", 80, 1);

    if (command == "simulate1d")
        return join(common_keys(), collision_keys(), option_keys(), grid1d_keys(), density_keys(0.1), time_keys());
    if (command == "simulate2d")
        return join(common_keys(), collision_keys(), option_keys(), grid2d_keys(), density_keys(0.1), time_keys());
    if (command == "fdm1d")
        return join(common_keys(), collision_keys(), grid1d_keys(), density_keys(0.1), time_keys(),
                    std::vector{nu_variant, substeps});
    if (command == "fdm2d")
        return join(common_keys(), collision_keys(), grid2d_keys(), density_keys(0.1), time_keys(),
                    std::vector{substeps});
    if (command == "analytic")
        return join(common_keys(), collision_keys(), grid1d_keys(), density_keys(0.1), time_keys(),
                    std::vector{nu_variant, l_trunc});
    if (command == "viscosity-sweep")
        return join(common_keys(), theta_grid_keys(), collision_keys(false), option_keys(),
                    std::vector{int_key("nx", 64, 2), derived(real_key("lx", nullptr, true), Derived::LxFromNx)},
                    density_keys(0.005), std::vector{int_key("steps", 200, 1)},
                    std::vector{choice_key("estimator", "pde_consistent", {"pde_consistent", "as_printed"})});
    if (command == "steepness-sweep") {
        KeySpec nxs{"nxs", Kind::IntList, Json::array({64}), 2.0};
        KeySpec horizons{"horizons", Kind::IntList, Json::array({200, 2000}), 1.0};
        return join(common_keys(), theta_grid_keys(), collision_keys(false), option_keys(),
                    std::vector{nxs, horizons, real_key("lx", 0.0, false, 0.0)}, density_keys(0.035));
    }
    if (command == "compare-analytic")
        return join(common_keys(), collision_keys(), option_keys(), grid1d_keys(), density_keys(0.1), time_keys(),
                    std::vector{l_trunc, KeySpec{"snapshots_dir", Kind::Text, ""}});
    if (command == "compare-2d") {
        KeySpec sets{"velocity_sets", Kind::ChoiceList, Json::array({"axis_symmetric", "orthogonal", "triangular"})};
        sets.choices = kVelocitySets;
        return join(common_keys(), collision_keys(), option_keys(), grid2d_keys(false), std::vector{sets},
                    density_keys(0.1), time_keys(), std::vector{substeps});
    }
    throw ConfigError("command", "unknown command '" + command + "'");
}

std::string kind_name(Kind k)
{
    switch (k) {
    case Kind::Int: return "an integer";
    case Kind::Real: return "a number";
    case Kind::Angle: return "an angle (number or multiple of pi such as \"pi/3\")";
    case Kind::Text: return "a string";
    case Kind::Choice: return "a string";
    case Kind::IntList: return "a non-empty array of integers";
    case Kind::AngleList: return "a non-empty array of angles";
    case Kind::ChoiceList: return "a non-empty array of strings";
    case Kind::Range: return "an object {start, stop, count}";
    }
    return "?";
}

std::string join_choices(const std::vector<std::string>& c)
{
    std::string s;
    for (std::size_t i = 0; i < c.size(); ++i)
        s += (i ? ", " : "") + c[i];
    return s;
}

void check_number(const KeySpec& spec, const std::string& key, double v)
{
    if (!std::isfinite(v))
        throw ConfigError(key, "must be finite");
    if (spec.positive && !(v > 0.0))
        throw ConfigError(key, "must be positive");
    if (spec.min && v < *spec.min) {
        std::ostringstream os;
        os << "must be at least " << *spec.min;
        throw ConfigError(key, os.str());
    }
}

void check_int(const KeySpec& spec, const std::string& key, const Json& v)
{
    if (!v.is_number_integer())
        throw ConfigError(key, "must be " + kind_name(Kind::Int));
    if (v.get<long long>() > 2147483647LL || v.get<long long>() < -2147483647LL)
        throw ConfigError(key, "out of range");
    check_number(spec, key, v.get<double>());
}

void check_value(const KeySpec& spec, const Json& v)
{
    const std::string& key = spec.name;
    auto type_error = [&] { return ConfigError(key, "must be " + kind_name(spec.kind)); };
    switch (spec.kind) {
    case Kind::Int:
        check_int(spec, key, v);
        break;
    case Kind::Real:
        if (!v.is_number())
            throw type_error();
        check_number(spec, key, v.get<double>());
        break;
    case Kind::Angle:
        parse_angle(v, key);
        break;
    case Kind::Text:
        if (!v.is_string())
            throw type_error();
        break;
    case Kind::Choice:
        if (!v.is_string())
            throw type_error();
        if (std::find(spec.choices.begin(), spec.choices.end(), v.get<std::string>()) == spec.choices.end())
            throw ConfigError(key, "must be one of " + join_choices(spec.choices) + ", got '" +
                                       v.get<std::string>() + "'");
        break;
    case Kind::IntList:
    case Kind::AngleList:
    case Kind::ChoiceList:
        if (!v.is_array() || v.empty())
            throw type_error();
        for (std::size_t i = 0; i < v.size(); ++i) {
            const std::string item = key + "[" + std::to_string(i) + "]";
            if (spec.kind == Kind::IntList) {
                check_int(spec, item, v[i]);
            } else if (spec.kind == Kind::AngleList) {
                parse_angle(v[i], item);
            } else {
                KeySpec one{item, Kind::Choice, nullptr};
                one.choices = spec.choices;
                check_value(one, v[i]);
            }
        }
        break;
    case Kind::Range: {
        if (!v.is_object())
            throw type_error();
        for (auto it = v.begin(); it != v.end(); ++it)
            if (it.key() != "start" && it.key() != "stop" && it.key() != "count")
                throw ConfigError(key + "." + it.key(), "unknown key");
        for (const char* part : {"start", "stop", "count"})
            if (!v.contains(part))
                throw ConfigError(key + "." + part, "required");
        parse_angle(v["start"], key + ".start");
        parse_angle(v["stop"], key + ".stop");
        check_int(int_key(key + ".count", nullptr, 2), key + ".count", v["count"]);
        break;
    }
    }
}

} // namespace

const std::vector<std::string>& command_names()
{
    static const std::vector<std::string> names{"simulate1d",      "simulate2d",       "fdm1d",
                                                "fdm2d",           "analytic",         "viscosity-sweep",
                                                "steepness-sweep", "compare-analytic", "compare-2d"};
    return names;
}

Json load_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("--config", "cannot read '" + path + "'");
    Json cfg;
    try {
        cfg = Json::parse(in, nullptr, true, true);
    } catch (const Json::parse_error& e) {
        throw ConfigError("--config", std::string("'") + path + "' is not valid JSON: " + e.what());
    }
    if (!cfg.is_object())
        throw ConfigError("--config", "'" + path + "' must hold a JSON object");
    return cfg;
}

void apply_override(Json& cfg, const std::string& assignment)
{
    const auto eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--override", "expected key=value, got '" + assignment + "'");
    const std::string path = assignment.substr(0, eq);
    const std::string text = assignment.substr(eq + 1);
    Json value;
    try {
        value = Json::parse(text);
    } catch (const Json::parse_error&) {
        value = text;
    }

    Json* node = &cfg;
    std::size_t start = 0;
    for (;;) {
        const auto dot = path.find('.', start);
        const std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
        if (part.empty())
            throw ConfigError("--override", "empty key segment in '" + path + "'");
        if (dot == std::string::npos) {
            (*node)[part] = std::move(value);
            return;
        }
        Json& child = (*node)[part];
        if (child.is_null())
            child = Json::object();
        if (!child.is_object())
            throw ConfigError(path.substr(0, dot), "is not an object, cannot set '" + path + "'");
        node = &child;
        start = dot + 1;
    }
}

Json resolve_config(const std::string& command, Json cfg)
{
    if (!cfg.is_object())
        throw ConfigError("command", "config must be a JSON object");
    if (!cfg.contains("command"))
        cfg["command"] = command;
    if (!cfg["command"].is_string())
        throw ConfigError("command", "must be a string");
    const std::string declared = cfg["command"].get<std::string>();
    const bool relabel = command == "compare-analytic" && declared == "simulate1d";
    if (declared != command && !relabel)
        throw ConfigError("command", "config is for '" + declared + "' but the subcommand is '" + command + "'");
    if (relabel)
        cfg["command"] = command;

    const std::vector<KeySpec> schema = schema_for(command);
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
        const bool known =
            std::any_of(schema.begin(), schema.end(), [&](const KeySpec& s) { return s.name == it.key(); });
        if (!known)
            throw ConfigError(it.key(), "unknown key for '" + command + "'");
    }

    Json out = Json::object();
    for (const KeySpec& spec : schema) {
        if (cfg.contains(spec.name)) {
            check_value(spec, cfg[spec.name]);
            out[spec.name] = cfg[spec.name];
            continue;
        }
        switch (spec.derived) {
        case Derived::RunId: {
            std::string id = command;
            std::replace(id.begin(), id.end(), '-', '_');
            out[spec.name] = id;
            break;
        }
        case Derived::LxFromNx:
            out[spec.name] = static_cast<double>(out.at("nx").get<int>());
            break;
        case Derived::EveryFromSteps:
            out[spec.name] = std::max(1, out.at("steps").get<int>());
            break;
        case Derived::None:
            if (!spec.fallback.is_null())
                out[spec.name] = spec.fallback;
            else if (!spec.optional)
                throw ConfigError(spec.name, "required for '" + command + "'");
            break;
        }
    }

    if (out.contains("thetas") && out.contains("theta_range"))
        throw ConfigError("thetas", "give either thetas or theta_range, not both");
    const bool wants_grid = std::any_of(schema.begin(), schema.end(), [](const KeySpec& s) { return s.name == "thetas"; });
    if (wants_grid && !out.contains("thetas") && !out.contains("theta_range"))
        throw ConfigError("thetas", "required (or theta_range) for '" + command + "'");

    const std::string id = out.at("run_id").get<std::string>();
    const bool id_ok = !id.empty() && std::all_of(id.begin(), id.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.';
    });
    if (!id_ok)
        throw ConfigError("run_id", "must be non-empty and use only letters, digits, '_', '-' and '.'");
    return out;
}

int get_int(const Json& cfg, const std::string& key)
{
    return cfg.at(key).get<int>();
}

double get_real(const Json& cfg, const std::string& key)
{
    return cfg.at(key).get<double>();
}

std::string get_text(const Json& cfg, const std::string& key)
{
    return cfg.at(key).get<std::string>();
}

std::vector<int> get_int_list(const Json& cfg, const std::string& key)
{
    return cfg.at(key).get<std::vector<int>>();
}

std::vector<std::string> get_text_list(const Json& cfg, const std::string& key)
{
    return cfg.at(key).get<std::vector<std::string>>();
}

double parse_angle(const Json& value, const std::string& key)
{
    if (value.is_number()) {
        const double v = value.get<double>();
        if (!std::isfinite(v))
            throw ConfigError(key, "must be finite");
        return v;
    }
    if (!value.is_string())
        throw ConfigError(key, "must be " + kind_name(Kind::Angle));
    static const std::regex number(R"(^\s*([-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?)\s*$)");
    static const std::regex multiple(
        R"(^\s*(?:([-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?)\s*\*\s*)?pi(?:\s*/\s*((?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?))?\s*$)");
    const std::string s = value.get<std::string>();
    std::smatch m;
    if (std::regex_match(s, m, number))
        return std::stod(m[1].str());
    if (std::regex_match(s, m, multiple)) {
        const double k = m[1].matched ? std::stod(m[1].str()) : 1.0;
        const double d = m[2].matched ? std::stod(m[2].str()) : 1.0;
        if (!(d > 0.0))
            throw ConfigError(key, "division by zero in '" + s + "'");
        return k * std::numbers::pi / d;
    }
    throw ConfigError(key, "cannot read angle '" + s + "'; use a number or a form like \"pi/3\" or \"2*pi/5\"");
}

double get_angle(const Json& cfg, const std::string& key)
{
    return parse_angle(cfg.at(key), key);
}

std::vector<double> get_thetas(const Json& cfg)
{
    std::vector<double> out;
    if (cfg.contains("thetas")) {
        const Json& list = cfg.at("thetas");
        for (std::size_t i = 0; i < list.size(); ++i)
            out.push_back(parse_angle(list[i], "thetas[" + std::to_string(i) + "]"));
        return out;
    }
    const Json& r = cfg.at("theta_range");
    const double start = parse_angle(r.at("start"), "theta_range.start");
    const double stop = parse_angle(r.at("stop"), "theta_range.stop");
    const int count = r.at("count").get<int>();
    for (int i = 0; i < count; ++i)
        out.push_back(i + 1 == count ? stop : start + (stop - start) * i / (count - 1));
    return out;
}

} // namespace qlgsim
