// squidbath: command-line driver for the SQUID/Ohmic-bath model

#include <algorithm>
#include <iostream>
#include <string>
#include <thread>

#include <CLI11.hpp>

#include <squidbath/version.hpp>

#include "commands.hpp"
#include "config.hpp"

int main(int argc, char** argv) {
    using namespace squidbath::cli;

    CLI::App app{"SQUID open-system spectroscopy and dynamics"};
    app.set_version_flag("--version", squidbath::kVersion);
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::size_t threads = 1;
    std::size_t dim = 0;
    bool seedless = false;
    app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
    app.add_option("--out", out_dir, "output directory (overrides output.directory)");
    app.add_option("--threads", threads, "worker threads for grid sweeps; 0 = hardware concurrency");
    app.add_option("--dim", dim, "basis dimension (space.dim, or dynamics.dim for evolve)");
    app.add_flag("--seedless", seedless, "deterministic mode; recorded in the manifest");

    for (const auto& name : command_names()) {
        app.add_subcommand(name, "run the " + name + " analysis")->fallthrough();
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitValidation;
    }

    const std::string command = app.get_subcommands().front()->get_name();

    RunContext ctx;
    try {
        ctx.config = config_path.empty() ? parse_config_text("{}") : parse_config(config_path);
        if (!out_dir.empty()) ctx.config.out_dir = out_dir;
        if (dim > 0) {
            if (command == "evolve") {
                ctx.config.dyn_dim = dim;
            } else {
                ctx.config.dim = dim;
                const auto& d = ctx.config.defaulted;
                if (std::find(d.begin(), d.end(), "space.pad") != d.end()) {
                    ctx.config.pad = dim / 4;
                }
            }
        }
        validate(ctx.config);
    } catch (const ParseError& e) {
        std::cerr << e.what() << '\n';
        return kExitValidation;
    } catch (const ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    }

    ctx.threads = threads == 0 ? std::max(1u, std::thread::hardware_concurrency()) : threads;
    ctx.seedless = seedless;
    return run_command(command, ctx, std::cerr);
}
