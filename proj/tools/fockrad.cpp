// fockrad: command-line workbench.
//   fockrad statistics [--config f] [--engine exact|mc|both] ...
//   fockrad wavepacket [--config f] ...
//   fockrad fit --histogram h.csv [--model single|first|delay]
//   fockrad replay --manifest out/manifest.json --out-dir again
// Exit codes: 0 ok, 2 configuration or input error, 3 numerical failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fockrad/config.h"
#include "fockrad/errors.h"
#include "fockrad/workbench.h"

namespace fs = std::filesystem;
using namespace fockrad;

namespace {

struct Options {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string engine;
  std::string out_dir = "fockrad_out";
  std::string format;
  bool plot = false;
  std::string histogram;
  std::string model;
  std::optional<int> restarts;
  std::string manifest;
};

void add_common(CLI::App* cmd, Options& opt) {
  cmd->add_option("--config", opt.config_path, "INI config file (defaults when omitted)");
  cmd->add_option("--seed", opt.seed, "master seed, overrides the config");
  cmd->add_option("--out-dir", opt.out_dir, "output directory")->capture_default_str();
  cmd->add_option("--format", opt.format, "csv or json");
  cmd->add_flag("--plot", opt.plot, "also write SVG plots");
}

Config resolve(Command command, const Options& opt) {
  Config config = opt.config_path.empty() ? Config{} : load_config(opt.config_path);
  if (opt.seed) {
    config.statistics.seed = *opt.seed;
    config.wavepacket.seed = *opt.seed;
  }
  if (!opt.engine.empty()) config.statistics.engine = engine_from_string(opt.engine);
  if (!opt.format.empty()) config.output.format = format_from_string(opt.format);
  if (opt.plot) config.output.plot = true;
  if (command == Command::fit) {
    if (!opt.histogram.empty()) config.fit.histogram = fs::absolute(opt.histogram).string();
    if (!opt.model.empty()) config.fit.model = model_from_string(opt.model);
    if (opt.restarts) {
      if (*opt.restarts < 0) throw ConfigError("--restarts must be >= 0");
      config.fit.restarts = *opt.restarts;
    }
  }
  return config;
}

int report(const CommandResult& result, const fs::path& out_dir) {
  for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
  std::cout << "wrote " << result.outputs.size() << " files to " << out_dir.string() << '\n';
  return result.success ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fock-state superradiance simulator and analysis workbench"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  Options opt;
  auto* statistics = app.add_subcommand("statistics", "heralded coincidence tables vs p");
  add_common(statistics, opt);
  statistics->add_option("--engine", opt.engine, "exact, mc or both");

  auto* wavepacket = app.add_subcommand("wavepacket", "analytic wavepackets and sampled histograms");
  add_common(wavepacket, opt);

  auto* fit = app.add_subcommand("fit", "fit a wavepacket model to a histogram");
  add_common(fit, opt);
  fit->add_option("--histogram", opt.histogram, "histogram CSV");
  fit->add_option("--model", opt.model, "single, first or delay");
  fit->add_option("--restarts", opt.restarts, "extra randomized starts");

  auto* replay_cmd = app.add_subcommand("replay", "re-run a command from its manifest");
  replay_cmd->add_option("--manifest", opt.manifest, "manifest.json of an earlier run")->required();
  replay_cmd->add_option("--out-dir", opt.out_dir, "output directory")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (replay_cmd->parsed()) return report(replay(opt.manifest, opt.out_dir), opt.out_dir);
    Command command = Command::statistics;
    if (wavepacket->parsed()) command = Command::wavepacket;
    if (fit->parsed()) command = Command::fit;
    return report(execute(command, resolve(command, opt), opt.out_dir), opt.out_dir);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return 3;
  } catch (const std::filesystem::filesystem_error& e) {
    std::cerr << "file error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
