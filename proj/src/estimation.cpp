#include "fockrad/estimation.h"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fockrad/counter_rng.h"
#include "fockrad/errors.h"

namespace fockrad {

namespace {

constexpr std::size_t kMinNonemptyBins = 20;
// Internal working units: ns and rad/ns keep all parameters O(1).
constexpr double kNs = 1e-9;

// 4-point Gauss-Legendre on [-1, 1].
constexpr std::array<double, 4> kGaussNodes{-0.8611363115940526, -0.3399810435848563,
                                            0.3399810435848563, 0.8611363115940526};
constexpr std::array<double, 4> kGaussWeights{0.3478548451374538, 0.6521451548625461,
                                              0.6521451548625461, 0.3478548451374538};

struct BinIntegral {
  double value = 0.0;
  double d_omega = 0.0;
  double d_decay = 0.0;
};

BinIntegral integrate_bin(WavepacketModel model, double lo, double hi, double omega,
                          double decay) {
  BinIntegral out;
  const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
  for (std::size_t q = 0; q < kGaussNodes.size(); ++q) {
    const ShapeGradient g = model_shape(model, mid + half * kGaussNodes[q], omega, decay);
    out.value += kGaussWeights[q] * g.value;
    out.d_omega += kGaussWeights[q] * g.d_omega;
    out.d_decay += kGaussWeights[q] * g.d_decay;
  }
  out.value *= half;
  out.d_omega *= half;
  out.d_decay *= half;
  return out;
}

struct Problem {
  WavepacketModel model;
  std::vector<double> lo, hi, center, y, weight;  // ns; weight = 1 / variance

  explicit Problem(const Histogram& h, WavepacketModel m) : model(m) {
    for (std::size_t k = 0; k < h.bins(); ++k) {
      lo.push_back(h.edges[k] / kNs);
      hi.push_back(h.edges[k + 1] / kNs);
      center.push_back(0.5 * (lo.back() + hi.back()));
      const auto c = static_cast<double>(h.counts[k]);
      y.push_back(c);
      weight.push_back(1.0 / std::max(c, 1.0));
    }
  }

  std::size_t size() const { return y.size(); }

  // Variance taken from the model at x instead of the data. Iterating this to
  // a fixed point gives the Poisson maximum-likelihood estimate, which lacks
  // the downward bias of 1 / counts weighting.
  void reweight(const Eigen::Vector3d& x) {
    std::vector<double> mu(size());
    double top = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
      mu[k] = x[0] * integrate_bin(model, lo[k], hi[k], x[1], x[2]).value;
      top = std::max(top, mu[k]);
    }
    for (std::size_t k = 0; k < size(); ++k) weight[k] = 1.0 / std::max(mu[k], 1e-12 * top);
  }

  // Best scale for a fixed shape and the resulting chi-square.
  std::pair<double, double> profile(double omega, double decay) const {
    std::vector<double> shape(size());
    double num = 0.0, den = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
      shape[k] = integrate_bin(model, lo[k], hi[k], omega, decay).value;
      num += weight[k] * y[k] * shape[k];
      den += weight[k] * shape[k] * shape[k];
    }
    if (!(den > 0.0)) return {0.0, std::numeric_limits<double>::infinity()};
    const double scale = num / den;
    double chi2 = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
      const double r = y[k] - scale * shape[k];
      chi2 += weight[k] * r * r;
    }
    return {scale, chi2};
  }

  double chi_square(const Eigen::Vector3d& x) const {
    double chi2 = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
      const double r = y[k] - x[0] * integrate_bin(model, lo[k], hi[k], x[1], x[2]).value;
      chi2 += weight[k] * r * r;
    }
    return chi2;
  }

  // Normal matrix J^T W J and J^T W r at x.
  double linearize(const Eigen::Vector3d& x, Eigen::Matrix3d& normal, Eigen::Vector3d& rhs) const {
    normal.setZero();
    rhs.setZero();
    double chi2 = 0.0;
    for (std::size_t k = 0; k < size(); ++k) {
      const BinIntegral b = integrate_bin(model, lo[k], hi[k], x[1], x[2]);
      const Eigen::Vector3d jac(b.value, x[0] * b.d_omega, x[0] * b.d_decay);
      const double r = y[k] - x[0] * b.value;
      normal.noalias() += weight[k] * jac * jac.transpose();
      rhs.noalias() += weight[k] * r * jac;
      chi2 += weight[k] * r * r;
    }
    return chi2;
  }
};

double model_envelope_factor(WavepacketModel model) {
  // Envelope rate = decay_rate / factor.
  return model == WavepacketModel::first_photon ? 1.0 : 2.0;
}

std::vector<double> smoothed(const std::vector<double>& y, std::size_t radius) {
  std::vector<double> s(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    const std::size_t a = k >= radius ? k - radius : 0;
    const std::size_t b = std::min(y.size() - 1, k + radius);
    double sum = 0.0;
    for (std::size_t q = a; q <= b; ++q) sum += y[q];
    s[k] = sum / static_cast<double>(b - a + 1);
  }
  return s;
}

// Largest spectral peak of the differenced histogram past the low frequency
// lobe; 0 if none. Differencing flattens the envelope's 1/w spectrum so its
// sidelobes do not mask the oscillation.
double spectral_frequency(const Problem& pr) {
  const std::size_t n = pr.size();
  const double span = pr.hi.back() - pr.lo.front();
  const double nyquist = kPi / (span / static_cast<double>(n));
  const double step = std::max(2.0 * kPi / (8.0 * span), nyquist / 20000.0);
  const auto count = static_cast<std::size_t>(nyquist / step);
  std::vector<double> magnitude(count + 1, 0.0);
  for (std::size_t j = 1; j <= count; ++j) {
    const double w = step * static_cast<double>(j);
    std::complex<double> acc{0.0, 0.0};
    for (std::size_t k = 0; k + 1 < n; ++k) {
      const double t = 0.5 * (pr.center[k] + pr.center[k + 1]);
      acc += (pr.y[k + 1] - pr.y[k]) * std::polar(1.0, -w * t);
    }
    magnitude[j] = std::abs(acc);
  }
  std::size_t j = 1;
  while (j + 1 <= count && magnitude[j + 1] <= magnitude[j]) ++j;  // skip the DC lobe
  std::size_t best = 0;
  for (; j + 1 <= count; ++j) {
    if (magnitude[j] > magnitude[j - 1] && magnitude[j] >= magnitude[j + 1] &&
        (best == 0 || magnitude[j] > magnitude[best])) {
      best = j;
    }
  }
  if (best == 0) return 0.0;
  // Parabolic refinement of the peak position.
  const double l = magnitude[best - 1], c = magnitude[best], r = magnitude[best + 1];
  const double denom = l - 2.0 * c + r;
  const double shift = denom != 0.0 ? 0.5 * (l - r) / denom : 0.0;
  return step * (static_cast<double>(best) + std::clamp(shift, -0.5, 0.5));
}

struct PeakEstimate {
  double decay = 0.0;  // model decay_rate (rad/ns)
  double omega = 0.0;  // from mean peak spacing
};

PeakEstimate peak_estimate(const Problem& pr, double omega_hint) {
  PeakEstimate est;
  const std::size_t n = pr.size();
  const double bin = (pr.hi.back() - pr.lo.front()) / static_cast<double>(n);
  std::size_t guard = 3;
  if (omega_hint > 0.0) {
    guard = std::max<std::size_t>(guard, static_cast<std::size_t>(2.0 * kPi / omega_hint / bin / 4.0));
  }
  const std::vector<double> s = smoothed(pr.y, 2);
  const double top = *std::max_element(s.begin(), s.end());
  std::vector<double> tx, ly;
  for (std::size_t k = guard; k + guard < n; ++k) {
    if (s[k] <= 0.05 * top || s[k] <= 0.0) continue;
    bool is_max = true;
    for (std::size_t q = k - guard; q <= k + guard && is_max; ++q) {
      if (q < k && s[q] >= s[k]) is_max = false;
      if (q > k && s[q] > s[k]) is_max = false;
    }
    if (!is_max) continue;
    tx.push_back(pr.center[k]);
    ly.push_back(std::log(s[k]));
  }
  if (tx.size() < 2) return est;
  const double mx = std::accumulate(tx.begin(), tx.end(), 0.0) / static_cast<double>(tx.size());
  const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / static_cast<double>(ly.size());
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < tx.size(); ++k) {
    sxy += (tx[k] - mx) * (ly[k] - my);
    sxx += (tx[k] - mx) * (tx[k] - mx);
  }
  const double slope = sxy / sxx;
  if (slope < 0.0) est.decay = -slope * model_envelope_factor(pr.model);
  est.omega = 2.0 * kPi * static_cast<double>(tx.size() - 1) / (tx.back() - tx.front());
  return est;
}

// Coarse log grid over (omega, decay) with the scale profiled out.
Eigen::Vector3d grid_start(const Problem& pr) {
  const double span = pr.hi.back() - pr.lo.front();
  const double bin = span / static_cast<double>(pr.size());
  constexpr int kSteps = 40;
  double best_chi2 = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best(0.0, 0.0, 0.0);
  for (int a = 0; a < kSteps; ++a) {
    const double omega = (2.0 * kPi / span) * std::pow(span / (2.0 * bin), a / (kSteps - 1.0));
    for (int b = 0; b < kSteps; ++b) {
      const double decay = (1.0 / span) * std::pow(span / bin, b / (kSteps - 1.0));
      const auto [scale, chi2] = pr.profile(omega, decay);
      if (scale > 0.0 && chi2 < best_chi2) {
        best_chi2 = chi2;
        best = {scale, omega, decay};
      }
    }
  }
  return best;
}

Eigen::Vector3d heuristic_start(const Problem& pr) {
  const double spectral = spectral_frequency(pr);
  const PeakEstimate peaks = peak_estimate(pr, spectral);

  std::vector<double> omegas;
  if (spectral > 0.0) omegas.push_back(spectral);
  if (peaks.omega > 0.0) omegas.push_back(peaks.omega);
  if (omegas.empty() || !(peaks.decay > 0.0)) return grid_start(pr);

  double best_chi2 = std::numeric_limits<double>::infinity();
  Eigen::Vector3d best(0.0, 0.0, 0.0);
  // The peak slope is only rough when few maxima clear the threshold, so
  // scan a factor of four either side of it with the scale profiled out.
  constexpr int kScan = 41;
  for (double omega : omegas) {
    for (int b = 0; b < kScan; ++b) {
      const double decay = peaks.decay * std::pow(4.0, (2.0 * b) / (kScan - 1.0) - 1.0);
      const auto [scale, chi2] = pr.profile(omega, decay);
      if (scale > 0.0 && chi2 < best_chi2) {
        best_chi2 = chi2;
        best = {scale, omega, decay};
      }
    }
  }
  if (!(best_chi2 < std::numeric_limits<double>::infinity())) return grid_start(pr);
  return best;
}

// Length of the remaining Gauss-Newton step per parameter in units of that
// parameter's curvature scale, |g_i| / sqrt(N_ii). Independent of units and of
// the overall count level.
double scaled_gradient(const Eigen::Matrix3d& normal, const Eigen::Vector3d& rhs) {
  double g = 0.0;
  for (int d = 0; d < 3; ++d) {
    if (normal(d, d) > 0.0) g = std::max(g, std::abs(rhs[d]) / std::sqrt(normal(d, d)));
  }
  return g;
}

struct LmOutcome {
  Eigen::Vector3d x;
  Eigen::Matrix3d normal;
  double chi2 = 0.0;
  bool converged = false;
  int iterations = 0;
};

LmOutcome levenberg_marquardt(const Problem& pr, Eigen::Vector3d x, const FitOptions& opt) {
  LmOutcome out;
  Eigen::Matrix3d normal;
  Eigen::Vector3d rhs;
  double chi2 = pr.linearize(x, normal, rhs);
  double lambda = 1e-3;
  int it = 0;
  for (; it < opt.max_iterations; ++it) {
    if (scaled_gradient(normal, rhs) <= opt.gradient_tolerance) {
      out.converged = true;
      break;
    }
    bool accepted = false;
    while (lambda < 1e20) {
      Eigen::Matrix3d damped = normal;
      for (int d = 0; d < 3; ++d) damped(d, d) *= 1.0 + lambda;
      const Eigen::Vector3d step = damped.ldlt().solve(rhs);
      const Eigen::Vector3d trial = x + step;
      if (trial.allFinite() && trial[0] > 0.0 && trial[1] > 0.0 && trial[2] > 0.0) {
        const double trial_chi2 = pr.chi_square(trial);
        if (trial_chi2 <= chi2) {
          const double drop = chi2 - trial_chi2;
          x = trial;
          lambda = std::max(lambda * 0.1, 1e-12);
          const double previous = chi2;
          chi2 = pr.linearize(x, normal, rhs);
          accepted = true;
          // Converged to machine precision: further steps cannot lower chi2.
          if (drop <= 4.0 * std::numeric_limits<double>::epsilon() * previous) {
            out.converged = scaled_gradient(normal, rhs) <= std::sqrt(opt.gradient_tolerance);
            ++it;
            out.x = x;
            out.normal = normal;
            out.chi2 = chi2;
            out.iterations = it;
            return out;
          }
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!accepted) {
      out.converged = scaled_gradient(normal, rhs) <= std::sqrt(opt.gradient_tolerance);
      break;
    }
  }
  out.x = x;
  out.normal = normal;
  out.chi2 = chi2;
  out.iterations = it;
  return out;
}

FitParameters to_si(const Eigen::Vector3d& x) { return {x[0] / kNs, x[1] / kNs, x[2] / kNs}; }

}  // namespace

ShapeGradient model_shape(WavepacketModel model, double t, double omega, double decay) {
  if (t < 0.0) return {0.0, 0.0, 0.0};
  const double w = omega, k = decay;
  const double s = std::sin(0.5 * w * t);
  const double sin_wt = std::sin(w * t), cos_wt = std::cos(w * t);
  const double w0sq = w * w + 0.25 * k * k;
  const double w0q = w0sq * w0sq;
  switch (model) {
    case WavepacketModel::single_photon: {
      const double e = std::exp(-0.5 * k * t);
      const double value = e * s * s;
      return {value, e * 0.5 * t * sin_wt, -0.5 * t * value};
    }
    case WavepacketModel::first_photon: {
      const double b1 = k * w / (2.0 * w0sq);
      const double c1 = k * k / (4.0 * w0sq);
      const double db1_dw = k / (2.0 * w0sq) - k * w * w / w0q;
      const double db1_dk = w / (2.0 * w0sq) - k * k * w / (4.0 * w0q);
      const double dc1_dw = -k * k * w / (2.0 * w0q);
      const double dc1_dk = k / (2.0 * w0sq) - k * k * k / (8.0 * w0q);
      const double bracket = 1.0 + b1 * sin_wt - c1 * cos_wt;
      const double dbr_dw = db1_dw * sin_wt + b1 * t * cos_wt - dc1_dw * cos_wt + c1 * t * sin_wt;
      const double dbr_dk = db1_dk * sin_wt - dc1_dk * cos_wt;
      const double e = std::exp(-k * t);
      const double value = e * s * s * bracket;
      return {value, e * (0.5 * t * sin_wt * bracket + s * s * dbr_dw),
              -t * value + e * s * s * dbr_dk};
    }
    case WavepacketModel::delay: {
      const double bt = 1.5 * w * w / w0sq - 1.0;
      const double ct = 3.0 * w * k / (4.0 * w0sq);
      const double dbt_dw = 3.0 * w / w0sq - 3.0 * w * w * w / w0q;
      const double dbt_dk = -3.0 * w * w * k / (4.0 * w0q);
      const double dct_dw = 3.0 * k / (4.0 * w0sq) - 3.0 * w * w * k / (2.0 * w0q);
      const double dct_dk = 3.0 * w / (4.0 * w0sq) - 3.0 * w * k * k / (8.0 * w0q);
      const double bracket = 1.0 + bt * cos_wt + ct * sin_wt;
      const double dbr_dw = dbt_dw * cos_wt - bt * t * sin_wt + dct_dw * sin_wt + ct * t * cos_wt;
      const double dbr_dk = dbt_dk * cos_wt + dct_dk * sin_wt;
      const double e = std::exp(-0.5 * k * t);
      const double value = e * bracket;
      return {value, e * dbr_dw, -0.5 * t * value + e * dbr_dk};
    }
  }
  return {0.0, 0.0, 0.0};
}

double FitResult::envelope_rate() const {
  return estimate.decay_rate / model_envelope_factor(model);
}

double FitResult::envelope_rate_sigma() const {
  return sigma.decay_rate / model_envelope_factor(model);
}

double FitResult::omega0() const {
  return std::sqrt(estimate.omega * estimate.omega +
                   0.25 * estimate.decay_rate * estimate.decay_rate);
}

FitParameters initial_guess(const Histogram& histogram, WavepacketModel model) {
  histogram.validate();
  return to_si(heuristic_start(Problem(histogram, model)));
}

FitResult fit_wavepacket(const Histogram& histogram, WavepacketModel model,
                         std::optional<FitParameters> initial, const FitOptions& options) {
  histogram.validate();
  if (histogram.nonempty_bins() < kMinNonemptyBins) {
    throw NumericalError("fit: insufficient data (" + std::to_string(histogram.nonempty_bins()) +
                         " nonempty bins, need " + std::to_string(kMinNonemptyBins) + ")");
  }
  Problem pr(histogram, model);

  Eigen::Vector3d start;
  if (initial) {
    start = {initial->scale * kNs, std::abs(initial->omega) * kNs, initial->decay_rate * kNs};
  } else {
    start = heuristic_start(pr);
  }
  if (!(start[0] > 0.0 && start[1] > 0.0 && start[2] > 0.0)) {
    throw NumericalError("fit: could not find a starting point");
  }

  LmOutcome best = levenberg_marquardt(pr, start, options);
  if (!best.converged && !initial) {
    LmOutcome retry = levenberg_marquardt(pr, grid_start(pr), options);
    if (retry.converged || retry.chi2 < best.chi2) best = retry;
  }
  for (int r = 0; r < options.restarts; ++r) {
    CounterRng rng(options.restart_seed, static_cast<std::uint64_t>(r));
    Eigen::Vector3d perturbed = start;
    perturbed[1] *= std::exp(0.4 * (rng.uniform() - 0.5));
    perturbed[2] *= std::exp(0.8 * (rng.uniform() - 0.5));
    perturbed[0] = pr.profile(perturbed[1], perturbed[2]).first;
    if (!(perturbed[0] > 0.0)) continue;
    LmOutcome candidate = levenberg_marquardt(pr, perturbed, options);
    if ((candidate.converged && !best.converged) ||
        (candidate.converged == best.converged && candidate.chi2 < best.chi2)) {
      best = candidate;
    }
  }

  constexpr int kReweightRounds = 8;
  for (int round = 0; round < kReweightRounds; ++round) {
    pr.reweight(best.x);
    LmOutcome next = levenberg_marquardt(pr, best.x, options);
    const double change = ((next.x - best.x).array() / best.x.array()).abs().maxCoeff();
    next.iterations += best.iterations;
    next.converged = next.converged && best.converged;
    best = next;
    if (change < 1e-9) break;
  }

  if (!(best.x[1] > 1e-6 * best.x[2])) {
    throw RegimeError("fit: oscillation frequency collapsed (overdamped data)");
  }

  FitResult result;
  result.model = model;
  result.estimate = to_si(best.x);
  result.chi_square = best.chi2;
  result.dof = pr.size() > 3 ? pr.size() - 3 : 0;
  result.converged = best.converged;
  result.iterations = best.iterations;
  const Eigen::Matrix3d cov = best.normal.inverse() / (kNs * kNs);
  for (int a = 0; a < 3; ++a) {
    for (int b = 0; b < 3; ++b) result.covariance[a][b] = cov(a, b);
  }
  result.sigma = {std::sqrt(std::max(cov(0, 0), 0.0)), std::sqrt(std::max(cov(1, 1), 0.0)),
                  std::sqrt(std::max(cov(2, 2), 0.0))};
  return result;
}

nlohmann::json fit_to_json(const FitResult& fit) {
  auto params = [](const FitParameters& p) {
    return nlohmann::json{{"scale_per_s", p.scale},
                          {"omega_rad_per_s", p.omega},
                          {"decay_rate_per_s", p.decay_rate}};
  };
  nlohmann::json j;
  j["schema"] = "fockrad.fit_result/1";
  j["model"] = std::string(to_string(fit.model));
  j["converged"] = fit.converged;
  j["reliable"] = fit.converged;
  j["iterations"] = fit.iterations;
  j["chi_square"] = fit.chi_square;
  j["dof"] = fit.dof;
  j["reduced_chi_square"] = fit.dof > 0 ? fit.chi_square / static_cast<double>(fit.dof) : 0.0;
  j["estimate"] = params(fit.estimate);
  j["sigma"] = params(fit.sigma);
  j["covariance"] = fit.covariance;
  j["derived"] = {{"envelope_rate_per_s", fit.envelope_rate()},
                  {"envelope_rate_sigma_per_s", fit.envelope_rate_sigma()},
                  {"omega0_rad_per_s", fit.omega0()},
                  {"chi_for_natural_linewidth", fit.estimate.decay_rate / kNaturalLinewidth}};
  return j;
}

SlopeFit loglog_slope(std::span<const PowerLawPoint> points) {
  if (points.size() < 3) throw ConfigError("loglog_slope: need at least 3 points");
  bool weighted = true;
  for (const auto& pt : points) {
    if (!(pt.x > 0.0) || !(pt.y > 0.0)) {
      throw NumericalError("loglog_slope: nonpositive data (x and y must be > 0)");
    }
    if (!(pt.sigma_y > 0.0) || !std::isfinite(pt.sigma_y)) weighted = false;
  }
  double s = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& pt : points) {
    const double lx = std::log(pt.x), ly = std::log(pt.y);
    const double w = weighted ? (pt.y / pt.sigma_y) * (pt.y / pt.sigma_y) : 1.0;
    s += w;
    sx += w * lx;
    sy += w * ly;
    sxx += w * lx * lx;
    sxy += w * lx * ly;
  }
  const double delta = s * sxx - sx * sx;
  if (!(delta > 0.0)) throw NumericalError("loglog_slope: x values must not all coincide");
  SlopeFit fit{};
  fit.slope = (s * sxy - sx * sy) / delta;
  fit.intercept = (sxx * sy - sx * sxy) / delta;
  if (weighted) {
    fit.slope_error = std::sqrt(s / delta);
  } else {
    double rss = 0.0;
    for (const auto& pt : points) {
      const double r = std::log(pt.y) - fit.intercept - fit.slope * std::log(pt.x);
      rss += r * r;
    }
    const double n = static_cast<double>(points.size());
    fit.slope_error = std::sqrt(rss / (n - 2.0) * n / delta);
  }
  return fit;
}

Measurement g2_from_table(const CoincidenceTable& table, std::size_t herald_row) {
  if (herald_row >= kHeraldRows || table.columns() < 3) {
    throw ConfigError("g2: table needs herald row and at least two field-2 leaves");
  }
  if (!table.available(herald_row)) throw NumericalError("g2: no heralds in requested row");
  const double p11 = table.at(herald_row, 1), s11 = table.sigma_at(herald_row, 1);
  const double p12 = table.at(herald_row, 2), s12 = table.sigma_at(herald_row, 2);
  if (!(p11 > 0.0) || p11 - s11 <= 0.0) {
    throw NumericalError("g2: undefined, P_{i,1} is compatible with zero");
  }
  const double g2 = p12 / (p11 * p11);
  const double d12 = s12 / (p11 * p11);
  const double d11 = 2.0 * p12 * s11 / (p11 * p11 * p11);
  return {g2, std::sqrt(d12 * d12 + d11 * d11)};
}

CoincidenceTable poisson_baseline(const CoincidenceTable& table) {
  CoincidenceTable base = table;
  base.counts.clear();
  base.trials = 0;
  for (std::size_t i = 0; i < kHeraldRows; ++i) {
    if (!table.available(i)) continue;
    const double p1 = table.at(i, 1), s1 = table.sigma_at(i, 1);
    double power = 1.0, rest = 1.0;
    for (std::size_t j = 1; j < table.columns(); ++j) {
      const double previous = power;
      power *= p1;
      base.at(i, j) = power;
      base.sigma_at(i, j) = static_cast<double>(j) * previous * s1;
      rest -= power;
    }
    base.at(i, 0) = rest;
    base.sigma_at(i, 0) = 0.0;
  }
  return base;
}

}  // namespace fockrad
