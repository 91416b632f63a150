#include "fockrad/fock_source.h"

#include <cmath>
#include <numeric>
#include <string>

#include "fockrad/errors.h"

namespace fockrad {

PairSource::PairSource(double p) : p_(p) {
  if (!(p >= 0.0 && p < 1.0)) {
    throw ConfigError("pair source: excitation probability must lie in [0, 1), got " +
                      std::to_string(p));
  }
}

double PairSource::number_probability(int n) const {
  if (n < 0) return 0.0;
  return (1.0 - p_) * std::pow(p_, n);
}

double PairSource::tail_mass(int n_max) const {
  if (n_max < 0) return 1.0;
  return std::pow(p_, n_max + 1);
}

int PairSource::auto_cutoff(double tolerance) const {
  if (p_ == 0.0) return 0;
  int n_max = 0;
  double bound = p_ / (1.0 - p_);
  while (bound >= tolerance) {
    bound *= p_;
    ++n_max;
  }
  return n_max;
}

ConditionalState::ConditionalState(int heralds, std::vector<double> weights)
    : heralds_(heralds), weights_(std::move(weights)) {
  if (heralds_ < 0 || weights_.empty()) {
    throw ConfigError("conditional state: need heralds >= 0 and at least one weight");
  }
}

double ConditionalState::weight(int n) const {
  if (n < heralds_ || n > n_max()) return 0.0;
  return weights_[static_cast<std::size_t>(n - heralds_)];
}

ConditionalState conditional_state(const PairSource& source, int heralds, int n_max,
                                   double tolerance) {
  if (heralds != 1 && heralds != 2) {
    throw ConfigError("conditional state: heralds must be 1 or 2");
  }
  if (n_max < heralds) {
    throw ConfigError("conditional state: n_max must be >= heralds");
  }
  const double p = source.p();
  const double dropped = std::pow(p, n_max - heralds + 1);
  if (dropped > tolerance) {
    throw CutoffError("conditional state: cutoff n_max=" + std::to_string(n_max) +
                      " drops relative mass " + std::to_string(dropped));
  }

  std::vector<double> weights(static_cast<std::size_t>(n_max - heralds + 1));
  double w = 1.0;
  for (double& x : weights) {
    x = w;
    w *= p;
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  for (double& x : weights) x /= total;
  return ConditionalState(heralds, std::move(weights));
}

}  // namespace fockrad
