// commands.hpp: Subcommand drivers writing CSV tables plus a manifest

#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "config.hpp"

namespace squidbath::cli {

enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3 };

struct RunContext {
    RunConfig config;
    std::size_t threads = 1;
    bool seedless = false;
};

// Names accepted by run_command.
const std::vector<std::string>& command_names();

/// Runs one subcommand end to end. Output files and `<prefix><command>.manifest.json`
/// land in config.out_dir. Numerical failures still write a manifest with
/// status "numerical_failure" and any partial outputs. Diagnostics go to `err`.
int run_command(const std::string& name, const RunContext& ctx, std::ostream& err);

}  // namespace squidbath::cli
