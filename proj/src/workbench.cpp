#include "fockrad/workbench.h"

#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "fockrad/coincidence_table.h"
#include "fockrad/counter_rng.h"
#include "fockrad/detection.h"
#include "fockrad/errors.h"
#include "fockrad/estimation.h"
#include "fockrad/histogram.h"
#include "fockrad/number_format.h"
#include "fockrad/svg_plot.h"
#include "fockrad/trial_simulator.h"
#include "fockrad/wavepacket.h"

#ifndef FOCKRAD_VERSION
#define FOCKRAD_VERSION "0.0.0-gunknown"
#endif

namespace fockrad {

namespace fs = std::filesystem;

std::string_view to_string(Command command) {
  switch (command) {
    case Command::statistics: return "statistics";
    case Command::wavepacket: return "wavepacket";
    case Command::fit: return "fit";
  }
  return "statistics";
}

Command command_from_string(std::string_view name) {
  if (name == "statistics") return Command::statistics;
  if (name == "wavepacket") return Command::wavepacket;
  if (name == "fit") return Command::fit;
  throw ConfigError("unknown command '" + std::string(name) + "'");
}

std::string_view tool_version() { return FOCKRAD_VERSION; }

namespace {

class OutputDir {
 public:
  OutputDir(const fs::path& dir, CommandResult& result) : dir_(dir), result_(result) {
    fs::create_directories(dir_);
  }

  void write(const std::string& name, const std::string& content) {
    std::ofstream out(dir_ / name, std::ios::binary | std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + (dir_ / name).string());
    out << content;
    result_.outputs.push_back(name);
  }

 private:
  fs::path dir_;
  CommandResult& result_;
};

std::string num(double v) { return format_double(v); }

// ---------------------------------------------------------------- statistics

struct EngineTables {
  std::string engine;
  std::vector<CoincidenceTable> tables;
};

std::optional<SlopeFit> slope_for(const std::vector<CoincidenceTable>& tables, std::size_t i,
                                  std::size_t j, std::size_t& used) {
  std::vector<PowerLawPoint> points;
  for (const auto& t : tables) {
    if (!t.available(i) || j >= t.columns()) continue;
    if (!(t.p1 > 0.0) || !(t.at(i, j) > 0.0)) continue;
    points.push_back({t.p1, t.at(i, j), t.sigma_at(i, j)});
  }
  used = points.size();
  if (points.size() < 3) return std::nullopt;
  return loglog_slope(points);
}

struct SummaryRow {
  double p, p1;
  std::array<double, 6> value;  // P11 P12 P13 P21 P22 P23
  std::array<double, 6> sigma;
  std::array<double, 4> poisson;  // P11^2 P11^3 P21^2 P21^3
  double g2, g2_sigma;
};

SummaryRow summarize(const CoincidenceTable& t) {
  SummaryRow row{};
  row.p = t.p;
  row.p1 = t.p1;
  const double nan = CoincidenceTable::unavailable();
  std::size_t k = 0;
  for (std::size_t i = 1; i <= 2; ++i) {
    for (std::size_t j = 1; j <= 3; ++j, ++k) {
      const bool ok = t.available(i) && j < t.columns();
      row.value[k] = ok ? t.at(i, j) : nan;
      row.sigma[k] = ok ? t.sigma_at(i, j) : nan;
    }
  }
  const CoincidenceTable base = poisson_baseline(t);
  for (std::size_t i = 1; i <= 2; ++i) {
    for (std::size_t j = 2; j <= 3; ++j) {
      const bool ok = t.available(i) && j < t.columns();
      row.poisson[(i - 1) * 2 + (j - 2)] = ok ? base.at(i, j) : nan;
    }
  }
  try {
    const Measurement g2 = g2_from_table(t);
    row.g2 = g2.value;
    row.g2_sigma = g2.sigma;
  } catch (const std::exception&) {
    row.g2 = row.g2_sigma = nan;
  }
  return row;
}

constexpr std::array<const char*, 3> kSlopeNames{"s12", "s13", "s23"};
constexpr std::array<std::pair<std::size_t, std::size_t>, 3> kSlopeEntries{
    {{1, 2}, {1, 3}, {2, 3}}};

void plot_statistics(OutputDir& out, const std::vector<EngineTables>& engines) {
  for (std::size_t i = 1; i <= 2; ++i) {
    std::vector<PlotSeries> series;
    for (const auto& e : engines) {
      for (std::size_t j = 1; j <= 3; ++j) {
        PlotSeries s{e.engine + " P" + std::to_string(i) + std::to_string(j), {}, {}, false,
                     e.engine == "mc"};
        for (const auto& t : e.tables) {
          if (!t.available(i) || j >= t.columns()) continue;
          s.x.push_back(t.p1);
          s.y.push_back(t.at(i, j));
        }
        series.push_back(std::move(s));
      }
    }
    const auto& ref = engines.front();
    for (std::size_t power = 1; power <= 3; ++power) {
      PlotSeries s{"Poisson P" + std::to_string(i) + "1^" + std::to_string(power), {}, {}, true,
                   false};
      for (const auto& t : ref.tables) {
        if (!t.available(i)) continue;
        s.x.push_back(t.p1);
        s.y.push_back(std::pow(t.at(i, 1), static_cast<double>(power)));
      }
      series.push_back(std::move(s));
    }
    std::ostringstream svg;
    write_svg_plot(svg,
                   {"P(" + std::to_string(i) + ",j) vs p1", "p1", "P(" + std::to_string(i) + ",j)",
                    true, true},
                   series);
    out.write("statistics_heralds" + std::to_string(i) + ".svg", svg.str());
  }
}

// ---------------------------------------------------------------- wavepacket

struct Curve {
  std::string name;
  std::vector<double> t_ns;
  std::vector<double> density;
};

std::string curve_csv(const Curve& c, std::size_t set, const WavepacketSet& s) {
  std::ostringstream out;
  out << "# fockrad curve v1\n";
  out << "# set=" << set << " omega0=" << num(s.omega0) << " chi=" << num(s.chi)
      << " curve=" << c.name << '\n';
  out << "t_ns,density\n";
  for (std::size_t k = 0; k < c.t_ns.size(); ++k) {
    out << num(c.t_ns[k]) << ',' << num(c.density[k]) << '\n';
  }
  return out.str();
}

nlohmann::json histogram_json(const Histogram& h) {
  std::vector<double> starts;
  for (std::size_t k = 0; k < h.bins(); ++k) starts.push_back(h.edges[k] * 1e9);
  return {{"bin_start_ns", starts},
          {"bin_width_ns", h.width(0) * 1e9},
          {"counts", h.counts},
          {"total", h.total}};
}

}  // namespace

CommandResult run_statistics(const Config& config, const fs::path& out_dir) {
  CommandResult result;
  OutputDir out(out_dir, result);
  const auto& sc = config.statistics;
  const DetectionTree field1 = sc.field1.build();
  const DetectionTree field2 = sc.field2.build();
  const bool csv = config.output.format == OutputFormat::csv;

  std::vector<EngineTables> engines;
  if (sc.engine != Engine::mc) {
    EngineTables e{"exact", {}};
    for (double p : sc.p_values) {
      e.tables.push_back(coincidence_table_exact(PairSource(p), field1, field2));
      if (!e.tables.back().available(1)) {
        result.warnings.push_back("exact p=" + num(p) + ": zero herald probability");
      }
    }
    engines.push_back(std::move(e));
  }
  if (sc.engine != Engine::exact) {
    EngineTables e{"mc", {}};
    for (std::size_t k = 0; k < sc.p_values.size(); ++k) {
      const TrialConfig tc{PairSource(sc.p_values[k]), field1, field2, sc.trials,
                           derive_seed(sc.seed, k)};
      e.tables.push_back(run_trials(tc));
      for (std::size_t i = 1; i < kHeraldRows; ++i) {
        if (!e.tables.back().available(i)) {
          result.warnings.push_back("mc p=" + num(sc.p_values[k]) + ": no trials with " +
                                    std::to_string(i) + " heralds, row unavailable");
        }
      }
    }
    engines.push_back(std::move(e));
  }

  nlohmann::json summary_json;
  std::ostringstream summary_csv, slopes_csv;
  summary_csv << "# fockrad statistics summary v1\n"
              << "engine,p,p1,P11,sigma_P11,P12,sigma_P12,P13,sigma_P13,P21,sigma_P21,P22,"
                 "sigma_P22,P23,sigma_P23,poisson_P12,poisson_P13,poisson_P22,poisson_P23,g2,"
                 "sigma_g2\n";
  slopes_csv << "# fockrad slopes v1\nengine,name,status,slope,slope_error,points\n";

  for (const auto& e : engines) {
    RunMetadata meta{{"engine", e.engine}, {"version", std::string(tool_version())}};
    if (e.engine == "mc") {
      meta["seed"] = std::to_string(sc.seed);
      meta["trials"] = std::to_string(sc.trials);
    }
    std::ostringstream tables;
    if (csv) {
      write_tables_csv(tables, e.tables, meta);
      out.write("tables_" + e.engine + ".csv", tables.str());
    } else {
      write_tables_json(tables, e.tables, meta);
      out.write("tables_" + e.engine + ".json", tables.str());
    }

    for (const auto& t : e.tables) {
      const SummaryRow r = summarize(t);
      summary_csv << e.engine << ',' << num(r.p) << ',' << num(r.p1);
      for (std::size_t k = 0; k < 6; ++k) summary_csv << ',' << num(r.value[k]) << ',' << num(r.sigma[k]);
      for (double v : r.poisson) summary_csv << ',' << num(v);
      summary_csv << ',' << num(r.g2) << ',' << num(r.g2_sigma) << '\n';

      auto nullable = [](double v) { return std::isnan(v) ? nlohmann::json() : nlohmann::json(v); };
      nlohmann::json row{{"engine", e.engine}, {"p", r.p}, {"p1", r.p1}};
      const std::array<const char*, 6> names{"P11", "P12", "P13", "P21", "P22", "P23"};
      for (std::size_t k = 0; k < 6; ++k) {
        row[names[k]] = nullable(r.value[k]);
        row[std::string("sigma_") + names[k]] = nullable(r.sigma[k]);
      }
      const std::array<const char*, 4> pnames{"poisson_P12", "poisson_P13", "poisson_P22",
                                              "poisson_P23"};
      for (std::size_t k = 0; k < 4; ++k) row[pnames[k]] = nullable(r.poisson[k]);
      row["g2"] = nullable(r.g2);
      row["sigma_g2"] = nullable(r.g2_sigma);
      summary_json["rows"].push_back(row);
    }

    for (std::size_t s = 0; s < kSlopeNames.size(); ++s) {
      std::size_t used = 0;
      const auto fit = slope_for(e.tables, kSlopeEntries[s].first, kSlopeEntries[s].second, used);
      slopes_csv << e.engine << ',' << kSlopeNames[s] << ',' << (fit ? "ok" : "unavailable") << ','
                 << (fit ? num(fit->slope) : "nan") << ','
                 << (fit ? num(fit->slope_error) : "nan") << ',' << used << '\n';
      nlohmann::json js{{"engine", e.engine}, {"name", kSlopeNames[s]}, {"points", used}};
      js["status"] = fit ? "ok" : "unavailable";
      if (fit) {
        js["slope"] = fit->slope;
        js["slope_error"] = fit->slope_error;
      }
      summary_json["slopes"].push_back(js);
    }
  }

  if (engines.size() == 2) {
    const auto& ex = engines[0].tables;
    const auto& mc = engines[1].tables;
    std::ostringstream rows;
    std::size_t compared = 0, within = 0;
    for (std::size_t k = 0; k < ex.size(); ++k) {
      for (std::size_t i = 0; i < kHeraldRows; ++i) {
        if (!ex[k].available(i) || !mc[k].available(i)) continue;
        for (std::size_t j = 0; j < ex[k].columns(); ++j) {
          const double z = (mc[k].at(i, j) - ex[k].at(i, j)) / mc[k].sigma_at(i, j);
          const bool ok = std::abs(z) < 4.0;
          ++compared;
          within += ok ? 1 : 0;
          rows << num(ex[k].p) << ',' << i << ',' << j << ',' << num(ex[k].at(i, j)) << ','
               << num(mc[k].at(i, j)) << ',' << num(mc[k].sigma_at(i, j)) << ',' << num(z) << ','
               << (ok ? 1 : 0) << '\n';
        }
      }
    }
    const double fraction = compared ? static_cast<double>(within) / static_cast<double>(compared) : 0.0;
    summary_json["agreement"] = {{"compared", compared}, {"within_4sigma", within},
                                 {"fraction", fraction}};
    if (csv) {
      std::ostringstream agreement;
      agreement << "# fockrad agreement v1\n# compared=" << compared << "\n# within_4sigma="
                << within << "\n# fraction=" << num(fraction) << '\n'
                << "p,i,j,P_exact,P_mc,sigma_mc,z,within_4sigma\n"
                << rows.str();
      out.write("agreement.csv", agreement.str());
    }
  }

  if (csv) {
    out.write("summary.csv", summary_csv.str());
    out.write("slopes.csv", slopes_csv.str());
  } else {
    summary_json["schema"] = "fockrad.statistics_summary/1";
    out.write("summary.json", summary_json.dump(2) + "\n");
  }
  if (config.output.plot) plot_statistics(out, engines);
  return result;
}

CommandResult run_wavepacket(const Config& config, const fs::path& out_dir) {
  CommandResult result;
  OutputDir out(out_dir, result);
  const auto& wc = config.wavepacket;
  const bool csv = config.output.format == OutputFormat::csv;
  const auto steps = static_cast<std::size_t>(std::llround(wc.t_max / wc.dt));
  const ReadWindowBackground background{wc.background_fraction, wc.t_max};

  std::ostringstream sets_csv;
  sets_csv << "# fockrad wavepacket sets v1\n"
           << "set,omega0,chi,gamma,dt,omega,alpha,decay_rate,envelope_time_ns,a1,b1,c1,a_tau,"
              "b_tau,c_tau,mass_beyond_t_max\n";
  nlohmann::json doc{{"schema", "fockrad.wavepackets/1"}};

  for (std::size_t s = 0; s < wc.sets.size(); ++s) {
    const WavepacketSet& set = wc.sets[s];
    const WavepacketParams params(set.omega0, set.chi, wc.gamma, wc.dt);
    const MarginalConstants mc = marginal_constants(params);
    const double tail = single_photon_survival(params, wc.t_max);
    sets_csv << s << ',' << num(set.omega0) << ',' << num(set.chi) << ',' << num(wc.gamma) << ','
             << num(wc.dt) << ',' << num(params.omega()) << ',' << num(params.alpha()) << ','
             << num(params.decay_rate()) << ',' << num(2.0 / params.decay_rate() * 1e9) << ','
             << num(mc.a1) << ',' << num(mc.b1) << ',' << num(mc.c1) << ',' << num(mc.a_tau)
             << ',' << num(mc.b_tau) << ',' << num(mc.c_tau) << ',' << num(tail) << '\n';

    std::vector<Curve> curves;
    const std::array<WavepacketModel, 3> models{WavepacketModel::single_photon,
                                                WavepacketModel::first_photon,
                                                WavepacketModel::delay};
    for (const auto model : models) {
      Curve c{std::string(to_string(model)), {}, {}};
      Curve env{std::string(to_string(model)) + "_envelope", {}, {}};
      for (std::size_t k = 0; k <= steps; ++k) {
        const double t = wc.dt * static_cast<double>(k);
        const double pdf = model == WavepacketModel::single_photon && background.fraction > 0.0
                               ? single_photon_pdf(params, t, background)
                               : model_pdf(params, model, t);
        c.t_ns.push_back(t * 1e9);
        c.density.push_back(pdf * wc.dt);
        env.t_ns.push_back(t * 1e9);
        env.density.push_back(envelope_pdf(params, model, t) * wc.dt);
      }
      curves.push_back(std::move(c));
      curves.push_back(std::move(env));
    }

    std::vector<std::pair<std::string, Histogram>> histograms;
    if (wc.samples > 0) {
      const TimeSampler sampler(params);
      const auto singles = sample_times(sampler, wc.samples, derive_seed(wc.seed, 2 * s), background);
      const auto pairs = sample_biphotons(sampler, wc.samples, derive_seed(wc.seed, 2 * s + 1));
      std::vector<double> first, delay;
      first.reserve(pairs.size());
      delay.reserve(pairs.size());
      for (const auto& pr : pairs) {
        first.push_back(pr.first);
        delay.push_back(pr.delay());
      }
      histograms.emplace_back("single", make_histogram(singles, 0.0, wc.t_max, steps));
      histograms.emplace_back("first", make_histogram(first, 0.0, wc.t_max, steps));
      histograms.emplace_back("delay", make_histogram(delay, 0.0, wc.t_max, steps));
    }

    const std::string prefix = "set" + std::to_string(s) + "_";
    if (csv) {
      for (const auto& c : curves) out.write(prefix + c.name + ".csv", curve_csv(c, s, set));
      for (const auto& [name, h] : histograms) {
        std::ostringstream hs;
        write_histogram_csv(hs, h);
        out.write(prefix + name + "_hist.csv", hs.str());
      }
    } else {
      nlohmann::json js{{"set", s},
                        {"omega0", set.omega0},
                        {"chi", set.chi},
                        {"omega", params.omega()},
                        {"alpha", params.alpha()},
                        {"decay_rate", params.decay_rate()},
                        {"mass_beyond_t_max", tail},
                        {"constants",
                         {{"a1", mc.a1}, {"b1", mc.b1}, {"c1", mc.c1},
                          {"a_tau", mc.a_tau}, {"b_tau", mc.b_tau}, {"c_tau", mc.c_tau}}}};
      for (const auto& c : curves) js["curves"][c.name] = {{"t_ns", c.t_ns}, {"density", c.density}};
      for (const auto& [name, h] : histograms) js["histograms"][name] = histogram_json(h);
      doc["sets"].push_back(js);
    }

    if (config.output.plot) {
      std::vector<PlotSeries> series;
      for (const auto& c : curves) {
        series.push_back({c.name, c.t_ns, c.density, c.name.ends_with("_envelope"), false});
      }
      std::ostringstream svg;
      write_svg_plot(svg,
                     {"omega0=" + num(set.omega0) + " rad/s, chi=" + num(set.chi), "t (ns)",
                      "probability per bin", false, false},
                     series);
      out.write(prefix + "wavepackets.svg", svg.str());
    }
  }

  if (csv) {
    out.write("sets.csv", sets_csv.str());
  } else {
    out.write("wavepackets.json", doc.dump(2) + "\n");
  }
  return result;
}

CommandResult run_fit(const Config& config, const fs::path& out_dir) {
  if (config.fit.histogram.empty()) throw ConfigError("fit: no histogram given");
  std::ifstream in(config.fit.histogram);
  if (!in) throw ConfigError("fit: cannot open histogram " + config.fit.histogram);
  const Histogram h = read_histogram_csv(in);

  CommandResult result;
  OutputDir out(out_dir, result);
  FitOptions options;
  options.restarts = config.fit.restarts;
  const FitResult fit = fit_wavepacket(h, config.fit.model, std::nullopt, options);
  result.success = fit.converged;
  if (!fit.converged) result.warnings.push_back("fit did not converge; estimates unreliable");

  nlohmann::json j = fit_to_json(fit);
  j["histogram"] = config.fit.histogram;
  out.write("fit.json", j.dump(2) + "\n");

  std::ostringstream curve;
  curve << "# fockrad fit curve v1\nbin_start_ns,counts,model_counts\n";
  PlotSeries data{"data", {}, {}, false, true}, model{"fit", {}, {}, false, false};
  for (std::size_t k = 0; k < h.bins(); ++k) {
    // Expected counts: scale * bin integral of the shape (Simpson is ample for display).
    const double a = h.edges[k], b = h.edges[k + 1];
    auto shape = [&](double t) {
      return model_shape(fit.model, t, fit.estimate.omega, fit.estimate.decay_rate).value;
    };
    const double expected =
        fit.estimate.scale * (b - a) / 6.0 * (shape(a) + 4.0 * shape(0.5 * (a + b)) + shape(b));
    curve << num(a * 1e9) << ',' << h.counts[k] << ',' << num(expected) << '\n';
    data.x.push_back(a * 1e9);
    data.y.push_back(static_cast<double>(h.counts[k]));
    model.x.push_back(a * 1e9);
    model.y.push_back(expected);
  }
  out.write("fit_curve.csv", curve.str());
  if (config.output.plot) {
    std::ostringstream svg;
    const std::vector<PlotSeries> series{data, model};
    write_svg_plot(svg, {"fit (" + std::string(to_string(fit.model)) + ")", "t (ns)", "counts",
                         false, false},
                   series);
    out.write("fit.svg", svg.str());
  }
  return result;
}

CommandResult execute(Command command, const Config& config, const fs::path& out_dir) {
  const auto start = std::chrono::steady_clock::now();
  CommandResult result;
  std::uint64_t seed = 0;
  switch (command) {
    case Command::statistics:
      result = run_statistics(config, out_dir);
      seed = config.statistics.seed;
      break;
    case Command::wavepacket:
      result = run_wavepacket(config, out_dir);
      seed = config.wavepacket.seed;
      break;
    case Command::fit:
      result = run_fit(config, out_dir);
      break;
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  nlohmann::json manifest{{"schema", "fockrad.manifest/1"},
                          {"command", std::string(to_string(command))},
                          {"config", render_config(config)},
                          {"seed", seed},
                          {"tool_version", std::string(tool_version())},
                          {"outputs", result.outputs},
                          {"warnings", result.warnings},
                          {"wall_clock_seconds", seconds}};
  std::ofstream out(out_dir / "manifest.json", std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write manifest in " + out_dir.string());
  out << manifest.dump(2) << '\n';
  return result;
}

RunManifest read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open manifest " + path.string());
  try {
    nlohmann::json j;
    in >> j;
    if (j.value("schema", "") != "fockrad.manifest/1") throw ConfigError("manifest: unknown schema");
    RunManifest m;
    m.command = j.at("command").get<std::string>();
    m.config = j.at("config").get<std::string>();
    m.seed = j.at("seed").get<std::uint64_t>();
    m.tool_version = j.at("tool_version").get<std::string>();
    m.outputs = j.at("outputs").get<std::vector<std::string>>();
    m.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("manifest: ") + e.what());
  }
}

CommandResult replay(const fs::path& manifest_path, const fs::path& out_dir) {
  const RunManifest m = read_manifest(manifest_path);
  std::istringstream text(m.config);
  return execute(command_from_string(m.command), parse_config(text), out_dir);
}

}  // namespace fockrad
