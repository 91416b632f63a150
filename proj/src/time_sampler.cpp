#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include <boost/math/interpolators/cubic_hermite.hpp>

#include "fockrad/counter_rng.h"
#include "fockrad/errors.h"
#include "fockrad/wavepacket.h"

namespace fockrad {

namespace {

constexpr std::size_t kMaxNodes = 1 << 20;
constexpr int kMaxRefinements = 60;
constexpr double kTailCut = 1e-14;

using Hermite = boost::math::interpolators::cubic_hermite<std::vector<double>>;

// Node slopes of the quantile function: the exact dt/du = 1 / pdf, clipped
// to three times the adjacent secants so the interpolant stays monotone
// (Hyman filter). Infinite at pdf zeros, hence always clipped there.
Hermite monotone_inverse(const WavepacketParams& params, const std::vector<double>& t,
                         const std::vector<double>& f) {
  const std::size_t n = t.size();
  std::vector<double> slope(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double pdf = single_photon_pdf(params, t[k]);
    double s = pdf > 0.0 ? 1.0 / pdf : std::numeric_limits<double>::infinity();
    if (k > 0) s = std::min(s, 3.0 * (t[k] - t[k - 1]) / (f[k] - f[k - 1]));
    if (k + 1 < n) s = std::min(s, 3.0 * (t[k + 1] - t[k]) / (f[k + 1] - f[k]));
    slope[k] = s;
  }
  return Hermite(std::vector<double>(f), std::vector<double>(t), std::move(slope));
}

}  // namespace

struct TimeSampler::Table {
  explicit Table(Hermite h) : inverse(std::move(h)) {}
  Hermite inverse;  // cdf -> t
};

TimeSampler::~TimeSampler() = default;
TimeSampler::TimeSampler(const TimeSampler&) = default;
TimeSampler& TimeSampler::operator=(const TimeSampler&) = default;

TimeSampler::TimeSampler(const WavepacketParams& params, double cdf_tolerance)
    : params_(params) {
  if (!(cdf_tolerance > 0.0)) throw ConfigError("time sampler: tolerance must be > 0");
  const double a = 0.5 * params.decay_rate();
  const double w = params.omega();

  // Survival is bounded by alpha/(2a) e^{-a t} (1 + b1 + c1) <= alpha/a e^{-a t}.
  t_max_ = std::log(params.alpha() / a / kTailCut) / a;
  const double period = 2.0 * kPi / w;
  const double h0 = std::min(period / 16.0, 1.0 / (8.0 * a));

  std::vector<double> t;
  const auto initial = static_cast<std::size_t>(std::ceil(t_max_ / h0));
  for (std::size_t k = 0; k <= initial; ++k) {
    t.push_back(t_max_ * static_cast<double>(k) / static_cast<double>(initial));
  }

  auto build = [&](const std::vector<double>& ts, std::vector<double>& keep_t,
                   std::vector<double>& keep_f) {
    keep_t.clear();
    keep_f.clear();
    for (double x : ts) {
      const double f = single_photon_cdf(params, x);
      if (!keep_f.empty() && !(f > keep_f.back())) continue;
      keep_t.push_back(x);
      keep_f.push_back(f);
    }
  };

  std::vector<double> node_t, node_f;
  for (int pass = 0;; ++pass) {
    build(t, node_t, node_f);
    if (node_t.size() > kMaxNodes) {
      throw NumericalError("time sampler: adaptive grid exceeded node budget");
    }
    Hermite trial = monotone_inverse(params, node_t, node_f);

    std::vector<double> refined;
    refined.reserve(node_t.size() * 2);
    bool split_any = false;
    for (std::size_t k = 0; k + 1 < node_t.size(); ++k) {
      refined.push_back(node_t[k]);
      bool split = false;
      for (double frac : {0.125, 0.25, 0.5, 0.75, 0.875}) {
        const double u = node_f[k] + frac * (node_f[k + 1] - node_f[k]);
        if (std::abs(single_photon_cdf(params, trial(u)) - u) > cdf_tolerance) {
          split = true;
          break;
        }
      }
      if (split) {
        refined.push_back(0.5 * (node_t[k] + node_t[k + 1]));
        split_any = true;
      }
    }
    refined.push_back(node_t.back());

    if (!split_any) {
      cdf_max_ = node_f.back();
      node_count_ = node_t.size();
      table_ = std::make_shared<const Table>(std::move(trial));
      break;
    }
    if (pass >= kMaxRefinements) {
      throw NumericalError("time sampler: CDF tolerance not reached");
    }
    t.swap(refined);
  }
}

double TimeSampler::quantile(double u) const {
  if (u <= 0.0) return 0.0;
  if (u >= cdf_max_) return t_max_;
  return std::clamp(table_->inverse(u), 0.0, t_max_);
}

namespace {

double draw_time(const TimeSampler& sampler, const ReadWindowBackground& background,
                 std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, index);
  if (background.fraction > 0.0 && rng.uniform() < background.fraction) {
    return rng.uniform() * background.window;
  }
  return sampler.quantile(rng.uniform());
}

BiphotonSample draw_pair(const TimeSampler& sampler, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, index);
  const double x = sampler.quantile(rng.uniform());
  const double y = sampler.quantile(rng.uniform());
  return {std::min(x, y), std::max(x, y)};
}

}  // namespace

std::vector<double> sample_times_serial(const TimeSampler& sampler, std::size_t count,
                                        std::uint64_t seed,
                                        const ReadWindowBackground& background) {
  background.validate();
  std::vector<double> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = draw_time(sampler, background, seed, k);
  return out;
}

std::vector<double> sample_times(const TimeSampler& sampler, std::size_t count,
                                 std::uint64_t seed, const ReadWindowBackground& background) {
  background.validate();
  std::vector<double> out(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] =
        draw_time(sampler, background, seed, static_cast<std::uint64_t>(k));
  }
  return out;
}

std::vector<double> sample_times(const WavepacketParams& params, std::size_t count,
                                 std::uint64_t seed) {
  if (count < 1) throw ConfigError("sample_times: count must be >= 1");
  return sample_times(TimeSampler(params), count, seed);
}

std::vector<BiphotonSample> sample_biphotons_serial(const TimeSampler& sampler,
                                                    std::size_t count, std::uint64_t seed) {
  std::vector<BiphotonSample> out(count);
  for (std::size_t k = 0; k < count; ++k) out[k] = draw_pair(sampler, seed, k);
  return out;
}

std::vector<BiphotonSample> sample_biphotons(const TimeSampler& sampler, std::size_t count,
                                             std::uint64_t seed) {
  std::vector<BiphotonSample> out(count);
  const auto n = static_cast<std::int64_t>(count);
#pragma omp parallel for schedule(static)
  for (std::int64_t k = 0; k < n; ++k) {
    out[static_cast<std::size_t>(k)] = draw_pair(sampler, seed, static_cast<std::uint64_t>(k));
  }
  return out;
}

}  // namespace fockrad
