#pragma once

#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include "dburgers/config.hpp"

namespace dburgers {

/// Version string written to every manifest.
std::string code_version();

/// Subcommands accepted by run_command, in help order.
const std::vector<std::string>& command_names();

/// Output directory for a run: config.output.directory, placed under
/// $DBURGERS_OUTPUT_ROOT when that variable is set and the directory is relative.
std::filesystem::path resolve_output_dir(const RunConfig& config);

/// Runs a subcommand and writes its artifacts (manifest.json, schema.json,
/// CSV series, JSON summaries, snapshots) under the output directory.
/// Returns the directory. Library errors propagate.
std::filesystem::path run_command(const std::string& name, const RunConfig& config);

/// 0 ok, 2 config error, 3 BlowUp, 4 PositivityLost, 5 NoConvergence, 1 anything else.
int exit_code_for(const std::exception_ptr& error);

}  // namespace dburgers
