#pragma once

#include "config.hpp"

#include <string>

namespace qlgsim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitDiverged = 2;
inline constexpr int kExitRuntime = 3;

struct RunOptions {
    std::string out_dir;
    std::string config_path; // empty when the config came from overrides only
    int threads = 1;
    bool gnuplot = false;
};

/// Validates, runs and writes artifacts plus manifest.json into the output
/// directory. ConfigError escapes before anything is written; later failures
/// are reported in the manifest and through the exit code.
int run_command(const std::string& command, const Json& resolved, const RunOptions& options);

} // namespace qlgsim
