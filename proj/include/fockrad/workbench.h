#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "fockrad/config.h"

namespace fockrad {

enum class Command { statistics, wavepacket, fit };

std::string_view to_string(Command command);
Command command_from_string(std::string_view name);

// "<semver>-g<git describe>" of the build.
std::string_view tool_version();

struct CommandResult {
  std::vector<std::string> outputs;  // file names relative to the output directory
  std::vector<std::string> warnings;
  bool success = true;  // false: fit did not converge
};

// Each command is a pure function of the config: the same config produces
// byte-identical output files.
CommandResult run_statistics(const Config& config, const std::filesystem::path& out_dir);
CommandResult run_wavepacket(const Config& config, const std::filesystem::path& out_dir);
CommandResult run_fit(const Config& config, const std::filesystem::path& out_dir);

struct RunManifest {
  std::string command;
  std::string config;  // fully resolved config text
  std::uint64_t seed = 0;
  std::string tool_version;
  std::vector<std::string> outputs;
  double wall_clock_seconds = 0.0;
};

// Runs `command` and writes manifest.json next to its outputs.
CommandResult execute(Command command, const Config& config, const std::filesystem::path& out_dir);

RunManifest read_manifest(const std::filesystem::path& path);

// Re-runs the command recorded in a manifest into `out_dir`.
CommandResult replay(const std::filesystem::path& manifest, const std::filesystem::path& out_dir);

}  // namespace fockrad
