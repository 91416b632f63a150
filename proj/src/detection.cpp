#include "fockrad/detection.h"

#include <bit>
#include <cmath>
#include <numeric>
#include <string>

#include "fockrad/errors.h"

namespace fockrad {

void DetectorModel::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) {
    throw ConfigError("detector: efficiency must lie in [0, 1]");
  }
  if (!(dark_prob >= 0.0 && dark_prob < 1.0)) {
    throw ConfigError("detector: dark_prob must lie in [0, 1)");
  }
}

DetectionTree::DetectionTree(std::vector<DetectorModel> leaves, std::vector<double> routing)
    : leaves_(std::move(leaves)), routing_(std::move(routing)) {
  if (leaves_.empty() || leaves_.size() > kMaxLeaves) {
    throw ConfigError("detection tree: leaf count must be in [1, " +
                      std::to_string(kMaxLeaves) + "]");
  }
  if (leaves_.size() != routing_.size()) {
    throw ConfigError("detection tree: one routing probability per leaf required");
  }
  for (const auto& leaf : leaves_) leaf.validate();
  double total = 0.0;
  for (double r : routing_) {
    if (!(r >= 0.0)) throw ConfigError("detection tree: routing probabilities must be >= 0");
    total += r;
  }
  if (total > 1.0 + 1e-12) {
    throw ConfigError("detection tree: routing probabilities sum above 1");
  }
}

DetectionTree DetectionTree::balanced(std::size_t leaf_count, DetectorModel detector) {
  if (leaf_count == 0) throw ConfigError("detection tree: leaf count must be >= 1");
  return DetectionTree(std::vector<DetectorModel>(leaf_count, detector),
                       std::vector<double>(leaf_count, 1.0 / static_cast<double>(leaf_count)));
}

double DetectionTree::tree_loss() const {
  return std::max(0.0, 1.0 - std::accumulate(routing_.begin(), routing_.end(), 0.0));
}

namespace {

void check_photons(int n_photons) {
  if (n_photons < 0) throw ConfigError("click distribution: photon number must be >= 0");
  if (n_photons > kMaxExactPhotons) {
    throw CutoffError("click distribution: exact mode limited to n <= " +
                      std::to_string(kMaxExactPhotons));
  }
}

}  // namespace

ClickDistribution click_distribution(int n_photons, const DetectionTree& tree) {
  check_photons(n_photons);
  const std::size_t leaves = tree.leaf_count();
  const std::size_t states = std::size_t{1} << leaves;

  double undetected = 1.0;
  for (std::size_t l = 0; l < leaves; ++l) undetected -= tree.detection_probability(l);
  undetected = std::max(0.0, undetected);

  // hit[mask]: probability that exactly the leaves in `mask` have registered
  // at least one photon so far.
  std::vector<double> hit(states, 0.0), next(states);
  hit[0] = 1.0;
  for (int photon = 0; photon < n_photons; ++photon) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::size_t mask = 0; mask < states; ++mask) {
      const double w = hit[mask];
      if (w == 0.0) continue;
      next[mask] += w * undetected;
      for (std::size_t l = 0; l < leaves; ++l) {
        next[mask | (std::size_t{1} << l)] += w * tree.detection_probability(l);
      }
    }
    hit.swap(next);
  }

  // Leaves not hit by photons may still fire from dark counts.
  ClickDistribution clicks(leaves + 1, 0.0);
  for (std::size_t mask = 0; mask < states; ++mask) {
    if (hit[mask] == 0.0) continue;
    std::vector<double> dark(leaves + 1, 0.0);
    dark[0] = 1.0;
    std::size_t free_leaves = 0;
    for (std::size_t l = 0; l < leaves; ++l) {
      if (mask & (std::size_t{1} << l)) continue;
      const double d = tree.leaves()[l].dark_prob;
      for (std::size_t k = ++free_leaves; k > 0; --k) {
        dark[k] = dark[k] * (1.0 - d) + dark[k - 1] * d;
      }
      dark[0] *= 1.0 - d;
    }
    const auto photon_clicks = static_cast<std::size_t>(std::popcount(mask));
    for (std::size_t k = 0; k <= free_leaves; ++k) {
      clicks[photon_clicks + k] += hit[mask] * dark[k];
    }
  }
  return clicks;
}

ClickDistribution click_distribution_inclusion_exclusion(int n_photons,
                                                         const DetectionTree& tree) {
  check_photons(n_photons);
  const std::size_t leaves = tree.leaf_count();
  const std::size_t states = std::size_t{1} << leaves;
  const std::size_t all = states - 1;

  // silent[mask] = P(no leaf in mask clicks).
  std::vector<double> silent(states);
  for (std::size_t mask = 0; mask < states; ++mask) {
    double no_dark = 1.0, captured = 0.0;
    for (std::size_t l = 0; l < leaves; ++l) {
      if (!(mask & (std::size_t{1} << l))) continue;
      no_dark *= 1.0 - tree.leaves()[l].dark_prob;
      captured += tree.detection_probability(l);
    }
    silent[mask] = no_dark * std::pow(std::max(0.0, 1.0 - captured), n_photons);
  }

  // P(clicked set == A) = sum_{B subset of A} (-1)^{|A \ B|} P(no click outside B).
  ClickDistribution clicks(leaves + 1, 0.0);
  for (std::size_t a = 0; a < states; ++a) {
    double exact = 0.0;
    for (std::size_t b = a;; b = (b - 1) & a) {
      const int sign = (std::popcount(a ^ b) % 2 == 0) ? 1 : -1;
      exact += sign * silent[all ^ b];
      if (b == 0) break;
    }
    clicks[static_cast<std::size_t>(std::popcount(a))] += exact;
  }
  return clicks;
}

CoincidenceTable coincidence_table_exact(const PairSource& source, const DetectionTree& field1,
                                         const DetectionTree& field2, std::optional<int> n_max,
                                         double tolerance) {
  const int cutoff = n_max.value_or(source.auto_cutoff(tolerance));
  if (cutoff < 0) throw ConfigError("exact table: n_max must be >= 0");
  if (source.tail_mass(cutoff) > tolerance) {
    throw CutoffError("exact table: cutoff n_max=" + std::to_string(cutoff) +
                      " leaves tail mass " + std::to_string(source.tail_mass(cutoff)));
  }
  if (cutoff > kMaxExactPhotons) {
    throw CutoffError("exact table: required cutoff " + std::to_string(cutoff) +
                      " exceeds exact-mode limit " + std::to_string(kMaxExactPhotons));
  }

  CoincidenceTable table(field2.leaf_count());
  table.p = source.p();

  std::array<double, kHeraldRows> herald{};
  std::vector<double> joint(kHeraldRows * table.columns(), 0.0);
  for (int n = 0; n <= cutoff; ++n) {
    const double pn = source.number_probability(n);
    if (pn == 0.0) continue;
    const ClickDistribution c1 = click_distribution(n, field1);
    const ClickDistribution c2 = click_distribution(n, field2);
    for (std::size_t i = 0; i < kHeraldRows && i < c1.size(); ++i) {
      herald[i] += pn * c1[i];
      for (std::size_t j = 0; j < c2.size(); ++j) {
        joint[i * table.columns() + j] += pn * c1[i] * c2[j];
      }
    }
  }

  for (std::size_t i = 0; i < kHeraldRows; ++i) {
    table.herald_probability[i] = herald[i];
    for (std::size_t j = 0; j < table.columns(); ++j) {
      table.at(i, j) = herald[i] > 0.0 ? joint[i * table.columns() + j] / herald[i]
                                       : CoincidenceTable::unavailable();
      table.sigma_at(i, j) = herald[i] > 0.0 ? 0.0 : CoincidenceTable::unavailable();
    }
  }
  table.p1 = herald[1];
  return table;
}

}  // namespace fockrad
