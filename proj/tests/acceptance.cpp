// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
// exits nonzero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "fockrad/config.h"
#include "fockrad/detection.h"
#include "fockrad/estimation.h"
#include "fockrad/histogram.h"
#include "fockrad/trial_simulator.h"
#include "fockrad/wavepacket.h"
#include "fockrad/workbench.h"
#include "quadrature.h"

using namespace fockrad;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

double period(const WavepacketParams& p) { return 2.0 * kPi / p.omega(); }

Histogram histogram_of(const std::vector<double>& times) {
  return make_histogram(times, 0.0, kDefaultReadWindow, 380);
}

// 1. Monte Carlo against exact enumeration on random configurations.
Verdict oracle_equivalence() {
  const auto start = Clock::now();
  std::mt19937_64 rng(20240501);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t compared = 0, within = 0;
  for (int c = 0; c < 20; ++c) {
    const double p = 1e-4 * std::pow(0.2 / 1e-4, u(rng));
    const double eta1 = 0.01 + 0.89 * u(rng);
    const double eta2 = 0.01 + 0.89 * u(rng);
    const double dark = u(rng) < 0.5 ? 0.0 : 1e-4;
    TrialConfig cfg;
    cfg.source = PairSource(p);
    cfg.field1 = DetectionTree::balanced(2, {eta1, dark});
    cfg.field2 = DetectionTree::balanced(4, {eta2, dark});
    cfg.n_trials = 10'000'000;
    cfg.seed = 1000 + static_cast<std::uint64_t>(c);
    const CoincidenceTable mc = run_trials(cfg);
    const CoincidenceTable exact = coincidence_table_exact(cfg.source, cfg.field1, cfg.field2);
    for (std::size_t i = 0; i < kHeraldRows; ++i) {
      if (!mc.available(i) || !exact.available(i)) continue;
      for (std::size_t j = 0; j < exact.columns(); ++j) {
        ++compared;
        if (std::abs(mc.at(i, j) - exact.at(i, j)) <= 4.0 * mc.sigma_at(i, j)) ++within;
      }
    }
  }
  const double elapsed = seconds_since(start);
  const double fraction = compared ? static_cast<double>(within) / static_cast<double>(compared) : 0.0;
  return {compared > 0 && fraction >= 0.99 && elapsed < 300.0,
          fmt("%zu/%zu entries within 4 sigma (%.4f), %.1f s", within, compared, fraction, elapsed)};
}

// 2. Plateau ratio P21 / P11 at small p.
Verdict plateau_ratio() {
  const CoincidenceTable t = coincidence_table_exact(
      PairSource(1e-4), DetectionTree::balanced(2, {0.3, 0.0}), DetectionTree::balanced(4, {0.03, 0.0}));
  const double ratio = t.at(2, 1) / t.at(1, 1);
  return {std::abs(ratio - 2.0) <= 0.06, fmt("P21/P11 = %.6f", ratio)};
}

struct Slopes {
  double s12, s13, s23;
};

Slopes slopes_of(const std::vector<CoincidenceTable>& tables) {
  auto slope = [&](std::size_t i, std::size_t j) {
    std::vector<PowerLawPoint> pts;
    for (const auto& t : tables) pts.push_back({t.p1, t.at(i, j), t.sigma_at(i, j)});
    return loglog_slope(pts).slope;
  };
  return {slope(1, 2), slope(1, 3), slope(2, 3)};
}

// 3. Scaling exponents from exact and Monte Carlo sweeps. The Monte Carlo
// sweep needs ~10 triple coincidences at its lowest p; fewer bias log P low
// and steepen the slopes.
Verdict scaling_exponents() {
  const DetectorModel det{0.9, 0.0};
  std::vector<CoincidenceTable> exact;
  for (double p : log_spaced(1e-4, 1e-2, 10)) {
    exact.push_back(coincidence_table_exact(PairSource(p), DetectionTree::balanced(2, det),
                                            DetectionTree::balanced(4, det)));
  }
  const Slopes e = slopes_of(exact);

  SweepSpec spec;
  spec.p_values = log_spaced(1e-2, 1e-1, 10);
  spec.field1 = DetectionTree::balanced(2, det);
  spec.field2 = DetectionTree::balanced(4, det);
  spec.trials_per_point = 100'000'000;
  spec.seed = 77;
  const Slopes m = slopes_of(sweep(spec));

  const bool exact_ok = std::abs(e.s12 - 1.0) <= 0.05 && std::abs(e.s13 - 2.0) <= 0.05 &&
                        std::abs(e.s23 - 1.0) <= 0.05;
  const bool mc_ok = std::abs(m.s12 - 1.0) <= 0.15 && std::abs(m.s13 - 2.0) <= 0.15 &&
                     std::abs(m.s23 - 1.0) <= 0.15;
  return {exact_ok && mc_ok, fmt("exact s12=%.4f s13=%.4f s23=%.4f; mc s12=%.3f s13=%.3f s23=%.3f",
                                 e.s12, e.s13, e.s23, m.s12, m.s13, m.s23)};
}

// 4. Heralded antibunching and the Poisson reference.
Verdict antibunching() {
  const CoincidenceTable t = coincidence_table_exact(
      PairSource(0.01), DetectionTree::balanced(2, {0.3, 0.0}), DetectionTree::balanced(4, {0.1, 0.0}));
  const double g2 = g2_from_table(t).value;
  const double baseline = g2_from_table(poisson_baseline(t)).value;
  return {g2 < 0.1 && std::abs(baseline - 1.0) < 1e-9,
          fmt("g2 = %.5f, baseline g2 = %.12f", g2, baseline)};
}

// 5. Normalization of the three densities.
Verdict normalization() {
  double worst = 0.0;
  for (double omega0 : {0.4e9, 0.27e9}) {
    for (double chi : {4.0, 2.52}) {
      const WavepacketParams p(omega0, chi);
      const double step = 0.5 * period(p), rate = 0.5 * p.decay_rate();
      const std::vector<std::function<double(double)>> pdfs{
          [&](double t) { return single_photon_pdf(p, t); },
          [&](double t) { return first_photon_pdf(p, t); },
          [&](double t) { return delay_pdf(p, t); }};
      for (const auto& f : pdfs) {
        worst = std::max(worst, std::abs(quad::integrate_to_infinity(f, 0.0, rate, step) - 1.0));
      }
    }
  }
  return {worst <= 1e-8, fmt("max |integral - 1| = %.3g", worst)};
}

// 6. Closed-form marginals against quadrature of the product density.
Verdict closed_forms() {
  std::mt19937_64 rng(606);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int s = 0; s < 10; ++s) {
    const double chi = 1.0 + 7.0 * u(rng);
    const double omega0 = 0.5 * chi * kNaturalLinewidth * (1.2 + 20.0 * u(rng));
    const WavepacketParams p(omega0, chi);
    const double step = 0.5 * period(p);
    const double horizon = 16.0 / p.decay_rate();
    for (int k = 0; k < 200; ++k) {
      const double t = horizon * (k + 0.5) / 200.0;
      const double later = quad::integrate_to_infinity(
          [&](double t2) { return single_photon_pdf(p, t2); }, t, 0.5 * p.decay_rate(), step);
      const double first = 2.0 * single_photon_pdf(p, t) * later;
      const double delay = 2.0 * quad::integrate_to_infinity(
                                     [&](double a) {
                                       return single_photon_pdf(p, a) * single_photon_pdf(p, a + t);
                                     },
                                     0.0, p.decay_rate(), step);
      if (first > 0.0) worst = std::max(worst, std::abs(first_photon_pdf(p, t) - first) / first);
      worst = std::max(worst, std::abs(delay_pdf(p, t) - delay) / delay);
    }
  }
  return {worst <= 1e-6, fmt("max relative error = %.3g", worst)};
}

// 7. First-photon envelope decays twice as fast as the delay envelope.
Verdict decay_relation() {
  const auto start = Clock::now();
  const WavepacketParams p(0.4e9, 4.0);
  const TimeSampler sampler(p);
  const auto pairs = sample_biphotons(sampler, 1'000'000, 7007);
  std::vector<double> first, delay;
  for (const auto& b : pairs) {
    first.push_back(b.first);
    delay.push_back(b.delay());
  }
  const FitResult f1 = fit_wavepacket(histogram_of(first), WavepacketModel::first_photon);
  const FitResult ft = fit_wavepacket(histogram_of(delay), WavepacketModel::delay);
  const double ratio = f1.envelope_rate() / ft.envelope_rate();
  const double k1 = f1.envelope_rate() / p.decay_rate();
  const double kt = 2.0 * ft.envelope_rate() / p.decay_rate();
  const double elapsed = seconds_since(start);
  const bool ok = f1.converged && ft.converged && std::abs(ratio - 2.0) <= 0.1 &&
                  std::abs(k1 - 1.0) <= 0.05 && std::abs(kt - 1.0) <= 0.05 && elapsed < 120.0;
  return {ok, fmt("ratio = %.4f, first/chiGamma = %.4f, 2*delay/chiGamma = %.4f, %.1f s", ratio, k1,
                  kt, elapsed)};
}

// 8. Optical-depth and read-power scalings.
Verdict parameter_scalings() {
  const double chi = chi_scaled(4.0, 15.9 / 31.4);
  const double omega0 = omega0_scaled(0.4e9, 1.76 / 3.95);
  return {std::abs(chi - 2.52) <= 0.01 && std::abs(omega0 - 0.27e9) <= 0.005e9,
          fmt("chi = %.4f, omega0 = %.5g rad/s", chi, omega0)};
}

// 9. Rabi frequency and decay rate are read off independently.
Verdict independence() {
  std::vector<FitResult> by_omega0;
  std::uint64_t seed = 900;
  for (double omega0 : {0.27e9, 0.4e9, 0.55e9}) {
    const WavepacketParams p(omega0, 4.0);
    by_omega0.push_back(fit_wavepacket(histogram_of(sample_times(p, 1'000'000, ++seed)),
                                       WavepacketModel::single_photon));
  }
  double worst_pull = 0.0;
  bool converged = true;
  for (std::size_t a = 0; a < by_omega0.size(); ++a) {
    converged = converged && by_omega0[a].converged;
    for (std::size_t b = a + 1; b < by_omega0.size(); ++b) {
      const double diff = by_omega0[a].envelope_rate() - by_omega0[b].envelope_rate();
      const double sigma = std::hypot(by_omega0[a].envelope_rate_sigma(),
                                      by_omega0[b].envelope_rate_sigma());
      worst_pull = std::max(worst_pull, std::abs(diff) / sigma);
    }
  }
  double worst_omega = 0.0;
  for (double chi : {2.52, 4.0, 6.0}) {
    const WavepacketParams p(0.4e9, chi);
    const FitResult f = fit_wavepacket(histogram_of(sample_times(p, 1'000'000, ++seed)),
                                       WavepacketModel::single_photon);
    converged = converged && f.converged;
    const double expected =
        std::sqrt(0.4e9 * 0.4e9 - 0.25 * p.decay_rate() * p.decay_rate());
    worst_omega = std::max(worst_omega, std::abs(f.estimate.omega / expected - 1.0));
  }
  return {converged && worst_pull <= 3.0 && worst_omega <= 0.01,
          fmt("envelope rates differ by at most %.2f sigma; Omega off by at most %.4f%%", worst_pull,
              100.0 * worst_omega)};
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// 10. Replaying a manifest reproduces every output byte for byte.
Verdict determinism() {
  const fs::path root = fs::temp_directory_path() / ("fockrad_acceptance_" + std::to_string(getpid()));
  fs::remove_all(root);

  Config c;
  c.statistics.p_values = {0.01, 0.03, 0.1};
  c.statistics.trials = 200'000;
  c.statistics.seed = 5;
  c.wavepacket.sets = {{0.4e9, 4.0}, {0.27e9, 2.52}};
  c.wavepacket.samples = 50'000;
  c.wavepacket.seed = 9;
  c.output.plot = true;

  struct Run {
    Command command;
    fs::path dir;
  };
  std::vector<Run> runs{{Command::statistics, root / "statistics"},
                        {Command::wavepacket, root / "wavepacket"},
                        {Command::fit, root / "fit"}};
  std::size_t files = 0, identical = 0;
  std::string mismatch;
  for (const auto& run : runs) {
    Config rc = c;
    if (run.command == Command::fit) {
      rc.fit.histogram = (root / "wavepacket" / "set0_single_hist.csv").string();
    }
    const CommandResult first = execute(run.command, rc, run.dir);
    const fs::path again = run.dir.string() + "_replay";
    replay(run.dir / "manifest.json", again);
    for (const auto& name : first.outputs) {
      ++files;
      if (slurp(run.dir / name) == slurp(again / name) && fs::exists(again / name)) {
        ++identical;
      } else if (mismatch.empty()) {
        mismatch = " first mismatch: " + name;
      }
    }
  }
  fs::remove_all(root);
  return {files > 0 && identical == files,
          fmt("%zu/%zu replayed files byte-identical%s", identical, files, mismatch.c_str())};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"oracle equivalence", oracle_equivalence},
      {"plateau ratio", plateau_ratio},
      {"scaling exponents", scaling_exponents},
      {"sub-Poissonian heralded statistics", antibunching},
      {"wavepacket normalization", normalization},
      {"closed-form marginals", closed_forms},
      {"decay-rate relation", decay_relation},
      {"parameter scalings", parameter_scalings},
      {"independence checks", independence},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    Verdict v{false, ""};
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failed;
    std::printf("%s criterion %zu (%s): %s\n", v.pass ? "PASS" : "FAIL", k + 1, criteria[k].first,
                v.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
