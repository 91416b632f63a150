#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fockrad {

// Tail mass allowed to be dropped when truncating the photon-number law.
inline constexpr double kDefaultTailTolerance = 1e-12;

// Two-mode squeezed pair source. Emits n photon pairs per trial with
// probability (1 - p) p^n.
class PairSource {
 public:
  explicit PairSource(double p);

  double p() const { return p_; }

  double number_probability(int n) const;

  // Mass beyond n_max: sum_{n > n_max} (1 - p) p^n = p^(n_max + 1).
  double tail_mass(int n_max) const;

  double mean_photon_number() const { return p_ / (1.0 - p_); }

  // Smallest n_max with p^(n_max+1) / (1 - p) < tolerance.
  int auto_cutoff(double tolerance = kDefaultTailTolerance) const;

 private:
  double p_;
};

// Ensemble state after `heralds` field-1 detections, stored as probability
// weights over excitation number n = heralds .. n_max.
class ConditionalState {
 public:
  ConditionalState(int heralds, std::vector<double> weights);

  int heralds() const { return heralds_; }
  int n_max() const { return heralds_ + static_cast<int>(weights_.size()) - 1; }

  // Probability of n excitations; zero outside [heralds, n_max].
  double weight(int n) const;
  std::span<const double> weights() const { return weights_; }

 private:
  int heralds_;
  std::vector<double> weights_;
};

// Weights proportional to p^(n - heralds), normalized after truncation.
// Throws CutoffError when the discarded relative mass p^(n_max-heralds+1)
// exceeds `tolerance`.
ConditionalState conditional_state(const PairSource& source, int heralds, int n_max,
                                   double tolerance = kDefaultTailTolerance);

}  // namespace fockrad
