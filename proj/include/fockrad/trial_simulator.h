#pragma once

#include <cstdint>
#include <vector>

#include "fockrad/coincidence_table.h"
#include "fockrad/detection.h"
#include "fockrad/fock_source.h"

namespace fockrad {

struct TrialConfig {
  PairSource source{0.0};
  DetectionTree field1 = DetectionTree::balanced(2, {});
  DetectionTree field2 = DetectionTree::balanced(4, {});
  std::uint64_t n_trials = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SweepSpec {
  std::vector<double> p_values;
  DetectionTree field1 = DetectionTree::balanced(2, {});
  DetectionTree field2 = DetectionTree::balanced(4, {});
  std::uint64_t trials_per_point = 1;
  std::uint64_t seed = 0;

  void validate() const;
};

// Click counts (field 1, field 2) of one trial. Trial `index` draws from its
// own random stream, so any execution order gives the same outcome.
struct TrialOutcome {
  std::uint32_t field1_clicks;
  std::uint32_t field2_clicks;
};
TrialOutcome simulate_trial(const TrialConfig& config, std::uint64_t index);

// Monte Carlo table. Conditional frequencies N_ij / N_i with uncertainty
// sqrt(max(N_ij, 1)) / N_i; rows with N_i == 0 are unavailable.
// run_trials uses OpenMP; run_trials_serial is the reference loop. Both
// return bit-identical tables.
CoincidenceTable run_trials(const TrialConfig& config);
CoincidenceTable run_trials_serial(const TrialConfig& config);

// One table per p value; point k uses seed derive_seed(spec.seed, k).
std::vector<CoincidenceTable> sweep(const SweepSpec& spec);

// n log-spaced values from lo to hi inclusive.
std::vector<double> log_spaced(double lo, double hi, std::size_t n);

}  // namespace fockrad
