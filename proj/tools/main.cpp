// qlgsim: command-line front end over the qlg C API.

#include "commands.hpp"
#include "config.hpp"

#include "qlg/qlg.h"

#include "CLI11.hpp"

#include <iostream>
#include <map>

namespace {

const std::map<std::string, std::string> kDescriptions{
    {"simulate1d", "run the 1D lattice gas and write density/population snapshots"},
    {"simulate2d", "run the 2D lattice gas on a velocity set and write snapshots"},
    {"fdm1d", "solve the 1D Burgers-like PDE with the explicit finite-difference scheme"},
    {"fdm2d", "solve the 2D PDE predicted for a velocity set with finite differences"},
    {"analytic", "evaluate the Cole-Hopf solution at the lattice sites"},
    {"viscosity-sweep", "measure the viscosity over a theta grid"},
    {"steepness-sweep", "measure the shock steepness over theta, grid size and horizon"},
    {"compare-analytic", "MSE of a 1D run against the analytic solution for both viscosities"},
    {"compare-2d", "relative L2 distance between the 2D lattice gas and the FDM solution"},
};

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Quantum lattice gas simulator for Burgers-like equations"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qlg_version()));

    std::string config;
    std::string out;
    std::vector<std::string> overrides;
    qlgsim::RunOptions options;

    for (const std::string& name : qlgsim::command_names()) {
        CLI::App* sub = app.add_subcommand(name, kDescriptions.at(name));
        sub->add_option("--config", config, "JSON config file")->check(CLI::ExistingFile);
        sub->add_option("--out", out, "output directory")->required();
        sub->add_option("--override", overrides, "key=value, value parsed as JSON; repeatable")
            ->allow_extra_args(false);
        sub->add_option("--threads", options.threads, "worker threads for the sweeps")
            ->check(CLI::PositiveNumber);
        sub->add_flag("--gnuplot", options.gnuplot, "also write a gnuplot script for the CSV outputs");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? qlgsim::kExitOk : qlgsim::kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    options.out_dir = out;
    options.config_path = config;
    try {
        qlgsim::Json cfg = config.empty() ? qlgsim::Json::object() : qlgsim::load_config_file(config);
        for (const std::string& o : overrides)
            qlgsim::apply_override(cfg, o);
        const qlgsim::Json resolved = qlgsim::resolve_config(command, std::move(cfg));
        return qlgsim::run_command(command, resolved, options);
    } catch (const qlgsim::ConfigError& e) {
        std::cerr << "qlgsim " << command << ": config error: " << e.what() << '\n';
        return qlgsim::kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "qlgsim " << command << ": " << e.what() << '\n';
        return qlgsim::kExitRuntime;
    }
}
