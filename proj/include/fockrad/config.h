#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "fockrad/detection.h"
#include "fockrad/wavepacket.h"

namespace fockrad {

enum class Engine { exact, mc, both };
enum class OutputFormat { csv, json };

std::string_view to_string(Engine engine);
std::string_view to_string(OutputFormat format);
Engine engine_from_string(std::string_view name);
OutputFormat format_from_string(std::string_view name);

// A detection tree as written in a config section: leaf count plus either a
// single value or one value per leaf for efficiency, dark_prob and routing.
struct TreeConfig {
  std::size_t leaves = 2;
  std::vector<double> efficiency{1.0};
  std::vector<double> dark_prob{0.0};
  std::vector<double> routing;  // empty: balanced 1 / leaves

  DetectionTree build() const;
};

struct StatisticsConfig {
  std::vector<double> p_values{1e-3, 1e-2, 1e-1};
  TreeConfig field1{2, {0.3}, {0.0}, {}};
  TreeConfig field2{4, {0.1}, {0.0}, {}};
  std::uint64_t trials = 1'000'000;
  std::uint64_t seed = 1;
  Engine engine = Engine::both;
};

struct WavepacketSet {
  double omega0;
  double chi;
};

struct WavepacketConfig {
  double gamma = kNaturalLinewidth;
  double dt = kDefaultBinWidth;
  double t_max = kDefaultReadWindow;
  std::vector<WavepacketSet> sets{{0.4e9, 4.0}};
  std::uint64_t samples = 0;
  std::uint64_t seed = 1;
  double background_fraction = 0.0;
};

struct FitConfig {
  std::string histogram;  // absolute path once resolved
  WavepacketModel model = WavepacketModel::single_photon;
  int restarts = 0;
};

struct OutputConfig {
  OutputFormat format = OutputFormat::csv;
  bool plot = false;
};

struct Config {
  StatisticsConfig statistics;
  WavepacketConfig wavepacket;
  FitConfig fit;
  OutputConfig output;
};

// Flat INI-style text:
//   [section]
//   key = value            ; lists are comma separated
// Sections: source, field1, field2, simulation, wavepacket, fit, output.
// Unknown sections or keys are errors. Throws ConfigError.
Config parse_config(std::istream& in);
Config load_config(const std::filesystem::path& path);

// Every key written explicitly; parse_config(render_config(c)) == c.
std::string render_config(const Config& config);

}  // namespace fockrad
