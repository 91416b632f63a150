#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "fockrad/coincidence_table.h"
#include "fockrad/fock_source.h"

namespace fockrad {

// Exact click statistics are only offered up to this many photons.
inline constexpr int kMaxExactPhotons = 20;
// Subset enumeration over leaves is exponential; trees are kept small.
inline constexpr std::size_t kMaxLeaves = 16;

// Threshold (non-number-resolving) detector.
struct DetectorModel {
  double efficiency = 1.0;
  double dark_prob = 0.0;  // spurious click probability per gate window

  void validate() const;
};

// Beam-splitter tree: each incoming photon independently reaches leaf l with
// probability routing[l]; the deficit 1 - sum(routing) is lost in the tree.
class DetectionTree {
 public:
  DetectionTree(std::vector<DetectorModel> leaves, std::vector<double> routing);

  // `leaf_count` identical detectors behind a lossless balanced cascade.
  static DetectionTree balanced(std::size_t leaf_count, DetectorModel detector);

  std::size_t leaf_count() const { return leaves_.size(); }
  std::span<const DetectorModel> leaves() const { return leaves_; }
  std::span<const double> routing() const { return routing_; }
  double tree_loss() const;

  // Probability that a single photon is routed to leaf l and detected there.
  double detection_probability(std::size_t leaf) const {
    return routing_[leaf] * leaves_[leaf].efficiency;
  }

 private:
  std::vector<DetectorModel> leaves_;
  std::vector<double> routing_;
};

// Probabilities over k = number of distinct clicking leaves, k = 0..leaf_count.
using ClickDistribution = std::vector<double>;

// Exact distribution by propagating photons one at a time over the set of
// leaves already hit (enumeration of routings), then applying dark counts.
ClickDistribution click_distribution(int n_photons, const DetectionTree& tree);

// Same quantity from the inclusion-exclusion closed form
//   P(no click in S) = prod_{l in S} (1 - d_l) * (1 - sum_{l in S} r_l eta_l)^n.
ClickDistribution click_distribution_inclusion_exclusion(int n_photons, const DetectionTree& tree);

// Exact P_{i,j}: both fields carry the same photon number n drawn from the
// source. Photon numbers up to n_max (automatic cutoff when not given).
CoincidenceTable coincidence_table_exact(const PairSource& source, const DetectionTree& field1,
                                         const DetectionTree& field2,
                                         std::optional<int> n_max = std::nullopt,
                                         double tolerance = kDefaultTailTolerance);

}  // namespace fockrad
