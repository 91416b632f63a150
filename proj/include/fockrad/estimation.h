#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>

#include <nlohmann/json.hpp>

#include "fockrad/coincidence_table.h"
#include "fockrad/histogram.h"
#include "fockrad/wavepacket.h"

namespace fockrad {

// Model for a histogram: expected counts in a bin = scale * integral of the
// unnormalized shape over the bin (time in seconds).
//   single: e^{-k t/2} sin^2(W t/2)
//   first:  e^{-k t} sin^2(W t/2) [1 + b1 sin(W t) - c1 cos(W t)]
//   delay:  e^{-k t/2} [1 + b_tau cos(W t) + c_tau sin(W t)]
// with k = decay_rate (chi Gamma), W = omega and omega0^2 = W^2 + k^2/4.
struct FitParameters {
  double scale = 0.0;       // counts per second
  double omega = 0.0;       // rad/s
  double decay_rate = 0.0;  // 1/s
};

struct FitOptions {
  int max_iterations = 200;
  // Stop once every component of the remaining Gauss-Newton step is below
  // this fraction of its curvature scale, |g_i| / sqrt(N_ii).
  double gradient_tolerance = 1e-10;
  // Extra starts from randomly perturbed initial guesses; best fit wins.
  int restarts = 0;
  std::uint64_t restart_seed = 0;
};

struct FitResult {
  WavepacketModel model = WavepacketModel::single_photon;
  FitParameters estimate;
  FitParameters sigma;  // 1-sigma from the inverse normal matrix
  std::array<std::array<double, 3>, 3> covariance{};
  double chi_square = 0.0;  // Pearson chi-square, model counts as variances
  std::size_t dof = 0;
  bool converged = false;  // false: estimates are unreliable
  int iterations = 0;

  // Rate of the model's exponential envelope (decay_rate or decay_rate / 2).
  double envelope_rate() const;
  double envelope_rate_sigma() const;
  // Undamped Rabi frequency sqrt(omega^2 + decay_rate^2 / 4).
  double omega0() const;
};

struct ShapeGradient {
  double value;
  double d_omega;
  double d_decay;
};
// Unnormalized model shape and its analytic derivatives. Any consistent
// time unit works (t * omega and t * decay_rate are dimensionless).
ShapeGradient model_shape(WavepacketModel model, double t, double omega, double decay_rate);

// Poisson-weighted least squares over (scale, omega, decay_rate), started
// from a spectral / log-envelope guess unless `initial` is given, refined by
// damped Gauss-Newton. The first pass weights bins by 1 / max(counts, 1);
// later passes use the fitted model counts as variances until the estimate
// stops moving, which is the Poisson maximum-likelihood point.
// Throws NumericalError with fewer than 20 nonempty bins and RegimeError if
// the fitted oscillation frequency collapses to zero.
FitResult fit_wavepacket(const Histogram& histogram, WavepacketModel model,
                         std::optional<FitParameters> initial = std::nullopt,
                         const FitOptions& options = {});

// The automatic starting point used by fit_wavepacket.
FitParameters initial_guess(const Histogram& histogram, WavepacketModel model);

nlohmann::json fit_to_json(const FitResult& fit);

struct PowerLawPoint {
  double x;
  double y;
  double sigma_y = 0.0;
};

struct SlopeFit {
  double slope;
  double slope_error;
  double intercept;
};

// Linear regression of log y on log x. Weighted by (y / sigma_y)^2 when
// every sigma_y is positive, otherwise unweighted with the residual-based
// standard error.
SlopeFit loglog_slope(std::span<const PowerLawPoint> points);

struct Measurement {
  double value;
  double sigma;
};

// g2 = P_{i,2} / P_{i,1}^2 with first-order error propagation.
Measurement g2_from_table(const CoincidenceTable& table, std::size_t herald_row = 1);

// Coherent-state reference: P_{i,j} = P_{i,1}^j for j >= 1, P_{i,0} the
// remainder.
CoincidenceTable poisson_baseline(const CoincidenceTable& table);

}  // namespace fockrad
