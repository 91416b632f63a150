#include "fockrad/trial_simulator.h"

#include <bit>
#include <cmath>
#include <string>

#include "fockrad/counter_rng.h"
#include "fockrad/errors.h"

namespace fockrad {

namespace {

// Geometric draws beyond this are cut off; p^kMaxPhotons is far below any
// resolvable frequency for p < 1.
constexpr int kMaxPhotons = 4096;

struct TreeKernel {
  std::vector<double> cumulative_routing;
  std::vector<double> efficiency;
  std::vector<double> dark;
  bool any_dark = false;

  explicit TreeKernel(const DetectionTree& tree) {
    double acc = 0.0;
    for (std::size_t l = 0; l < tree.leaf_count(); ++l) {
      acc += tree.routing()[l];
      cumulative_routing.push_back(acc);
      efficiency.push_back(tree.leaves()[l].efficiency);
      dark.push_back(tree.leaves()[l].dark_prob);
      any_dark = any_dark || tree.leaves()[l].dark_prob > 0.0;
    }
  }

  // Route each photon, apply per-leaf detection, then dark counts; returns
  // the number of distinct clicking leaves.
  std::uint32_t clicks(int photons, CounterRng& rng) const {
    std::uint32_t mask = 0;
    const std::size_t leaves = efficiency.size();
    for (int k = 0; k < photons; ++k) {
      const double u = rng.uniform();
      std::size_t leaf = 0;
      while (leaf < leaves && u >= cumulative_routing[leaf]) ++leaf;
      if (leaf == leaves) continue;  // lost in the tree
      if (rng.uniform() < efficiency[leaf]) mask |= 1u << leaf;
    }
    if (any_dark) {
      for (std::size_t l = 0; l < leaves; ++l) {
        if (rng.uniform() < dark[l]) mask |= 1u << l;
      }
    }
    return static_cast<std::uint32_t>(std::popcount(mask));
  }
};

class TrialKernel {
 public:
  explicit TrialKernel(const TrialConfig& config)
      : p_(config.source.p()),
        log_p_(p_ > 0.0 ? std::log(p_) : 0.0),
        seed_(config.seed),
        field1_(config.field1),
        field2_(config.field2) {}

  TrialOutcome operator()(std::uint64_t index) const {
    CounterRng rng(seed_, index);
    const int n = draw_photons(rng);
    const std::uint32_t c1 = field1_.clicks(n, rng);
    const std::uint32_t c2 = field2_.clicks(n, rng);
    return {c1, c2};
  }

 private:
  // P(n >= k) = p^k.
  int draw_photons(CounterRng& rng) const {
    const double u = 1.0 - rng.uniform();  // (0, 1]
    if (u > p_) return 0;
    const double n = std::floor(std::log(u) / log_p_);
    return n >= kMaxPhotons ? kMaxPhotons : static_cast<int>(n);
  }

  double p_;
  double log_p_;
  std::uint64_t seed_;
  TreeKernel field1_;
  TreeKernel field2_;
};

class Accumulator {
 public:
  Accumulator(std::size_t rows, std::size_t columns)
      : rows_(rows), columns_(columns), counts_(rows * columns, 0) {}

  void add(const TrialOutcome& o) { ++counts_[o.field1_clicks * columns_ + o.field2_clicks]; }

  void merge(const Accumulator& other) {
    for (std::size_t k = 0; k < counts_.size(); ++k) counts_[k] += other.counts_[k];
  }

  CoincidenceTable finish(const TrialConfig& config) const {
    CoincidenceTable table(columns_ - 1);
    table.p = config.source.p();
    table.trials = config.n_trials;
    table.counts.assign(kHeraldRows * columns_, 0);
    for (std::size_t i = 0; i < kHeraldRows && i < rows_; ++i) {
      std::uint64_t heralds = 0;
      for (std::size_t j = 0; j < columns_; ++j) {
        table.counts[i * columns_ + j] = counts_[i * columns_ + j];
        heralds += counts_[i * columns_ + j];
      }
      table.herald_counts[i] = heralds;
      table.herald_probability[i] =
          static_cast<double>(heralds) / static_cast<double>(config.n_trials);
      for (std::size_t j = 0; j < columns_; ++j) {
        if (heralds == 0) {
          table.at(i, j) = CoincidenceTable::unavailable();
          table.sigma_at(i, j) = CoincidenceTable::unavailable();
          continue;
        }
        const auto events = static_cast<double>(counts_[i * columns_ + j]);
        const auto n_i = static_cast<double>(heralds);
        table.at(i, j) = events / n_i;
        table.sigma_at(i, j) = std::sqrt(std::max(events, 1.0)) / n_i;
      }
    }
    table.p1 = table.herald_probability[1];
    return table;
  }

 private:
  std::size_t rows_;
  std::size_t columns_;
  std::vector<std::uint64_t> counts_;
};

}  // namespace

void TrialConfig::validate() const {
  if (n_trials < 1) throw ConfigError("trial config: n_trials must be >= 1");
}

void SweepSpec::validate() const {
  if (p_values.empty()) throw ConfigError("sweep: p list must be non-empty");
  for (double p : p_values) {
    if (!(p > 0.0 && p < 1.0)) throw ConfigError("sweep: p values must lie in (0, 1)");
  }
  if (trials_per_point < 1) throw ConfigError("sweep: trials per point must be >= 1");
}

TrialOutcome simulate_trial(const TrialConfig& config, std::uint64_t index) {
  return TrialKernel(config)(index);
}

CoincidenceTable run_trials_serial(const TrialConfig& config) {
  config.validate();
  const TrialKernel kernel(config);
  Accumulator acc(config.field1.leaf_count() + 1, config.field2.leaf_count() + 1);
  for (std::uint64_t t = 0; t < config.n_trials; ++t) acc.add(kernel(t));
  return acc.finish(config);
}

CoincidenceTable run_trials(const TrialConfig& config) {
  config.validate();
  const TrialKernel kernel(config);
  const std::size_t rows = config.field1.leaf_count() + 1;
  const std::size_t columns = config.field2.leaf_count() + 1;
  Accumulator total(rows, columns);
  const auto n = static_cast<std::int64_t>(config.n_trials);

#pragma omp parallel
  {
    Accumulator local(rows, columns);
#pragma omp for schedule(static) nowait
    for (std::int64_t t = 0; t < n; ++t) local.add(kernel(static_cast<std::uint64_t>(t)));
#pragma omp critical
    total.merge(local);
  }
  return total.finish(config);
}

std::vector<CoincidenceTable> sweep(const SweepSpec& spec) {
  spec.validate();
  std::vector<CoincidenceTable> tables;
  tables.reserve(spec.p_values.size());
  for (std::size_t k = 0; k < spec.p_values.size(); ++k) {
    TrialConfig config{PairSource(spec.p_values[k]), spec.field1, spec.field2,
                       spec.trials_per_point, derive_seed(spec.seed, k)};
    tables.push_back(run_trials(config));
  }
  return tables;
}

std::vector<double> log_spaced(double lo, double hi, std::size_t n) {
  if (!(lo > 0.0 && hi > 0.0) || n == 0) throw ConfigError("log_spaced: need lo, hi > 0, n >= 1");
  if (n == 1) return {lo};
  std::vector<double> values(n);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t k = 0; k < n; ++k) {
    values[k] = std::exp(a + (b - a) * static_cast<double>(k) / static_cast<double>(n - 1));
  }
  values.front() = lo;
  values.back() = hi;
  return values;
}

}  // namespace fockrad
