#include "doctest.h"

#include <cmath>
#include <random>

#include <boost/math/distributions/chi_squared.hpp>
#include <omp.h>

#include "fockrad/errors.h"
#include "fockrad/histogram.h"
#include "fockrad/wavepacket.h"
#include "quadrature.h"

using namespace fockrad;

namespace {

const WavepacketParams kReference(0.4e9, 4.0);

double chi_square_p_value(const std::vector<double>& samples, const WavepacketParams& p,
                          double hi, std::size_t bins,
                          double (*cdf)(const WavepacketParams&, double)) {
  const Histogram h = make_histogram(samples, 0.0, hi, bins);
  const double n = static_cast<double>(samples.size());
  double chi2 = 0.0;
  std::uint64_t inside = 0;
  for (std::size_t k = 0; k < bins; ++k) {
    const double expected = n * (cdf(p, h.edges[k + 1]) - cdf(p, h.edges[k]));
    const double d = static_cast<double>(h.counts[k]) - expected;
    chi2 += d * d / expected;
    inside += h.counts[k];
  }
  const double expected_out = n * (1.0 - cdf(p, hi));
  const double d = static_cast<double>(samples.size() - inside) - expected_out;
  chi2 += d * d / expected_out;
  return boost::math::cdf(boost::math::complement(boost::math::chi_squared(double(bins)), chi2));
}

// P(min(t1, t2) <= t) = 1 - S(t)^2.
double first_photon_cdf(const WavepacketParams& p, double t) {
  const double s = single_photon_survival(p, t);
  return 1.0 - s * s;
}

}  // namespace

TEST_CASE("quantile inverts the cdf to the requested tolerance") {
  for (const WavepacketParams& p :
       {kReference, WavepacketParams(0.27e9, 4.0), WavepacketParams(0.4e9, 2.52),
        WavepacketParams(3e9, 1.0)}) {
    const TimeSampler sampler(p);
    CHECK(sampler.nodes() > 10);
    CHECK(single_photon_survival(p, sampler.t_max()) < 1e-13);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int k = 0; k < 20000; ++k) {
      const double x = u(rng);
      CHECK(std::abs(single_photon_cdf(p, sampler.quantile(x)) - x) < 1e-8);
    }
    double last = 0.0;
    for (int k = 0; k <= 100000; ++k) {
      const double t = sampler.quantile(k / 100000.0);
      CHECK(t >= last);
      last = t;
    }
  }
}

TEST_CASE("empirical mean matches the analytic mean") {
  const double mean = quad::integrate_to_infinity(
      [](double t) { return t * single_photon_pdf(kReference, t); }, 0.0, 0.5 * kReference.decay_rate(),
      kPi / kReference.omega());
  const double second = quad::integrate_to_infinity(
      [](double t) { return t * t * single_photon_pdf(kReference, t); }, 0.0,
      0.5 * kReference.decay_rate(), kPi / kReference.omega());
  const double sd = std::sqrt(second - mean * mean);
  const auto samples = sample_times(kReference, 1'000'000, 123);
  double sum = 0.0;
  for (double t : samples) sum += t;
  const double est = sum / static_cast<double>(samples.size());
  CHECK(std::abs(est - mean) < 3.0 * sd / std::sqrt(1e6));
}

TEST_CASE("histogram chi-square test passes across seeds") {
  const TimeSampler sampler(kReference);
  for (std::uint64_t seed : {1u, 2u, 3u, 4u, 5u}) {
    const auto samples = sample_times(sampler, 200'000, seed);
    const double pv = chi_square_p_value(samples, kReference, 100e-9, 100, single_photon_cdf);
    INFO("seed " << seed << " p-value " << pv);
    CHECK(pv > 0.001);
  }
}

TEST_CASE("ordered pairs follow the first-photon law") {
  const TimeSampler sampler(kReference);
  const auto pairs = sample_biphotons(sampler, 500'000, 77);
  std::vector<double> first;
  for (const auto& pr : pairs) {
    CHECK(pr.first <= pr.second);
    first.push_back(pr.first);
  }
  CHECK(chi_square_p_value(first, kReference, 60e-9, 100, first_photon_cdf) > 0.001);
}

TEST_CASE("parallel sampling equals the serial reference") {
  const TimeSampler sampler(WavepacketParams(0.27e9, 4.0));
  const ReadWindowBackground bg{0.1, kDefaultReadWindow};
  const auto serial = sample_times_serial(sampler, 100'003, 9, bg);
  const auto pairs_serial = sample_biphotons_serial(sampler, 50'001, 9);
  for (int threads : {1, 2, 5}) {
    omp_set_num_threads(threads);
    CHECK(sample_times(sampler, 100'003, 9, bg) == serial);
    const auto pairs = sample_biphotons(sampler, 50'001, 9);
    bool same = pairs.size() == pairs_serial.size();
    for (std::size_t k = 0; same && k < pairs.size(); ++k) {
      same = pairs[k].first == pairs_serial[k].first && pairs[k].second == pairs_serial[k].second;
    }
    CHECK(same);
  }
  CHECK(sample_times(sampler, 1000, 9) != sample_times(sampler, 1000, 10));
}

TEST_CASE("background samples are uniform over the window") {
  const TimeSampler sampler(kReference);
  const auto samples = sample_times(sampler, 400'000, 3, {0.5, kDefaultReadWindow});
  // Beyond 150 ns the wavepacket has no measurable mass left.
  std::size_t late = 0;
  for (double t : samples) late += t > 150e-9 && t < kDefaultReadWindow;
  const double expect = 400'000 * 0.5 * 40.0 / 190.0;
  CHECK(std::abs(static_cast<double>(late) - expect) < 4.0 * std::sqrt(expect));
}

TEST_CASE("sampler argument checks") {
  CHECK_THROWS_AS(sample_times(kReference, 0, 1), ConfigError);
  CHECK_THROWS_AS(TimeSampler(kReference, 0.0), ConfigError);
}
