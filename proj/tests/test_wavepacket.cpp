#include "doctest.h"

#include <cmath>
#include <random>

#include "fockrad/errors.h"
#include "fockrad/wavepacket.h"
#include "quadrature.h"

using namespace fockrad;

namespace {

const WavepacketParams kReference(0.4e9, 4.0);

double period(const WavepacketParams& p) { return 2.0 * kPi / p.omega(); }

// Second photon after t1, integrated numerically.
double first_marginal_oracle(const WavepacketParams& p, double t1) {
  const double later = quad::integrate_to_infinity(
      [&](double t2) { return single_photon_pdf(p, t2); }, t1, 0.5 * p.decay_rate(),
      0.5 * period(p));
  return 2.0 * single_photon_pdf(p, t1) * later;
}

// Ordered delay: twice the overlap of the density with its shifted copy.
double delay_marginal_oracle(const WavepacketParams& p, double tau) {
  return 2.0 * quad::integrate_to_infinity(
                   [&](double t) { return single_photon_pdf(p, t) * single_photon_pdf(p, t + tau); },
                   0.0, p.decay_rate(), 0.5 * period(p));
}

WavepacketParams random_params(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double chi = 1.0 + 6.0 * u(rng);
  const double kappa = chi * kNaturalLinewidth;
  const double omega0 = 0.5 * kappa * (1.1 + 15.0 * u(rng));
  return WavepacketParams(omega0, chi);
}

}  // namespace

TEST_CASE("derived parameters of the reference set") {
  CHECK(kReference.omega() == doctest::Approx(3.9267e8).epsilon(1e-4));
  CHECK(kReference.alpha() == doctest::Approx(1.5817e8).epsilon(1e-4));
  CHECK(2.0 / kReference.decay_rate() == doctest::Approx(13.12e-9).epsilon(1e-3));
  CHECK(kReference.decay_rate() == doctest::Approx(1.5243e8).epsilon(1e-4));
}

TEST_CASE("densities vanish at t = 0 except the delay") {
  CHECK(single_photon_density(kReference, 0.0) == 0.0);
  CHECK(first_photon_density(kReference, 0.0) == 0.0);
  const auto c = marginal_constants(kReference);
  CHECK(delay_density(kReference, 0.0) == doctest::Approx(c.a_tau * (1.0 + c.b_tau)).epsilon(1e-12));
  CHECK(delay_density(kReference, 0.0) > 0.0);
}

TEST_CASE("marginal constants") {
  const auto c = marginal_constants(kReference);
  const double k = kReference.decay_rate(), w = kReference.omega(), w0 = kReference.omega0();
  CHECK(c.a1 == doctest::Approx(2.0 * kReference.alpha() * kReference.dt()));
  CHECK(c.b1 == doctest::Approx(k * w / (2 * w0 * w0)));
  CHECK(c.c1 == doctest::Approx(k * k / (4 * w0 * w0)));
  CHECK(c.a_tau == doctest::Approx(kReference.alpha() * kReference.dt() * w0 * w0 / (2 * w * w + 2 * k * k)));
  CHECK(c.b_tau == doctest::Approx((6 * w * w - 4 * w0 * w0) / (4 * w0 * w0)));
  CHECK(c.c_tau == doctest::Approx(3 * w * k / (4 * w0 * w0)));
}

TEST_CASE("all three densities integrate to one") {
  for (const WavepacketParams& p :
       {kReference, WavepacketParams(0.27e9, 4.0), WavepacketParams(0.4e9, 2.52)}) {
    const double step = 0.5 * period(p);
    const double rate = 0.5 * p.decay_rate();
    const double single =
        quad::integrate_to_infinity([&](double t) { return single_photon_pdf(p, t); }, 0, rate, step);
    const double first =
        quad::integrate_to_infinity([&](double t) { return first_photon_pdf(p, t); }, 0, rate, step);
    const double delay =
        quad::integrate_to_infinity([&](double t) { return delay_pdf(p, t); }, 0, rate, step);
    CHECK(std::abs(single - 1.0) < 1e-9);
    CHECK(std::abs(first - 1.0) < 1e-8);
    CHECK(std::abs(delay - 1.0) < 1e-8);
  }
}

TEST_CASE("cdf and survival agree with quadrature") {
  for (double t : {1e-9, 5e-9, 16e-9, 40e-9, 120e-9}) {
    const double area = quad::integrate([&](double x) { return single_photon_pdf(kReference, x); }, 0.0,
                                        t, 1e-9);
    CHECK(single_photon_cdf(kReference, t) == doctest::Approx(area).epsilon(1e-11));
    CHECK(single_photon_survival(kReference, t) == doctest::Approx(1.0 - area).epsilon(1e-8));
  }
  CHECK(single_photon_cdf(kReference, 0.0) == 0.0);
  CHECK(single_photon_survival(kReference, 1e-6) > 0.0);
}

TEST_CASE("biphoton density is the symmetric product") {
  const double joint = quad::integrate_to_infinity(
      [&](double t1) {
        return quad::integrate_to_infinity(
            [&](double t2) { return biphoton_joint_pdf(kReference, t1, t2); }, 0.0,
            0.5 * kReference.decay_rate(), 0.5 * period(kReference));
      },
      0.0, 0.5 * kReference.decay_rate(), 0.5 * period(kReference));
  CHECK(std::abs(joint - 1.0) < 1e-8);
  for (double a : {1e-9, 7e-9, 30e-9}) {
    CHECK(biphoton_joint_pdf(kReference, a, a) == doctest::Approx(std::pow(single_photon_pdf(kReference, a), 2)));
    CHECK(biphoton_joint_pdf(kReference, a, 2.5 * a) == biphoton_joint_pdf(kReference, 2.5 * a, a));
  }
}

TEST_CASE("first-photon and delay closed forms match quadrature marginals") {
  std::mt19937_64 rng(7);
  std::vector<WavepacketParams> sets{kReference};
  for (int k = 0; k < 3; ++k) sets.push_back(random_params(rng));
  for (const auto& p : sets) {
    const double horizon = 16.0 / p.decay_rate();
    double worst_first = 0.0, worst_delay = 0.0;
    for (int k = 1; k <= 60; ++k) {
      const double t = horizon * k / 60.0;
      const double f = first_marginal_oracle(p, t);
      const double d = delay_marginal_oracle(p, t);
      worst_first = std::max(worst_first, std::abs(first_photon_pdf(p, t) - f) / f);
      worst_delay = std::max(worst_delay, std::abs(delay_pdf(p, t) - d) / d);
    }
    CHECK(worst_first < 1e-6);
    CHECK(worst_delay < 1e-6);
  }
}

TEST_CASE("zeros of the single-photon density sit at multiples of the period") {
  for (int m = 1; m <= 4; ++m) {
    const double t = m * period(kReference);
    CHECK(single_photon_pdf(kReference, t) < 1e-20 * kReference.alpha());
    CHECK(single_photon_pdf(kReference, t + 0.05 * period(kReference)) > 0.0);
  }
}

TEST_CASE("envelope rates") {
  CHECK(envelope_rate(kReference, WavepacketModel::single_photon) == 0.5 * kReference.decay_rate());
  CHECK(envelope_rate(kReference, WavepacketModel::first_photon) == kReference.decay_rate());
  CHECK(envelope_rate(kReference, WavepacketModel::delay) == 0.5 * kReference.decay_rate());
  // The envelope bounds the oscillating single-photon density from above.
  for (double t = 1e-9; t < 100e-9; t += 0.7e-9) {
    CHECK(single_photon_pdf(kReference, t) <= envelope_pdf(kReference, WavepacketModel::single_photon, t));
  }
}

TEST_CASE("single atom with strong read decays at the natural rate") {
  const WavepacketParams p(5e9, 1.0);
  CHECK(p.decay_rate() == kNaturalLinewidth);
  CHECK(envelope_rate(p, WavepacketModel::single_photon) * 2.0 == doctest::Approx(kNaturalLinewidth));
  // Local maxima of the density fall off as e^{-Gamma t / 2}.
  const double t1 = (2.0 * 10 + 1) * kPi / p.omega();
  const double t2 = (2.0 * 60 + 1) * kPi / p.omega();
  const double rate = std::log(single_photon_pdf(p, t1) / single_photon_pdf(p, t2)) / (t2 - t1);
  CHECK(rate == doctest::Approx(0.5 * kNaturalLinewidth).epsilon(1e-9));
}

TEST_CASE("read power changes the oscillation, not the envelope") {
  const WavepacketParams low(0.27e9, 4.0);
  CHECK(low.decay_rate() == kReference.decay_rate());
  CHECK(low.omega() < kReference.omega());
  const WavepacketParams fewer(0.4e9, 2.52);
  CHECK(fewer.omega0() == kReference.omega0());
  const double expect = std::sqrt(0.4e9 * 0.4e9 - std::pow(2.52 * kNaturalLinewidth / 2, 2));
  CHECK(fewer.omega() == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("truncation mass at the end of the read window") {
  CHECK(single_photon_survival(kReference, kDefaultReadWindow) < 1e-6);
  CHECK(single_photon_survival(WavepacketParams(0.27e9, 4.0), kDefaultReadWindow) < 1e-6);
  // Fewer atoms decay more slowly; about 1e-4 of the photon is left after 190 ns.
  const double slow = single_photon_survival(WavepacketParams(0.4e9, 2.52), kDefaultReadWindow);
  CHECK(slow > 1e-5);
  CHECK(slow < 2e-4);
}

TEST_CASE("geometry and scalings") {
  CHECK(chi_from_geometry({0.0, 75e-6, 2 * kPi / 780.24e-9, {}}) == 1.0);
  const double k = 2 * kPi / 780.24e-9, w = 75e-6;
  CHECK(chi_from_geometry({3.0 * w * w * k * k, w, k, {}}) == doctest::Approx(4.0));
  CHECK(chi_from_geometry({1.1e6, w, k, {}}) == doctest::Approx(4.0).epsilon(0.01));

  CHECK(chi_scaled(4.0, 15.9 / 31.4) == doctest::Approx(2.519).epsilon(1e-3));
  CHECK(chi_scaled(3.3, 1.0) == 3.3);
  CHECK(chi_scaled(1.0, 0.37) == 1.0);
  CHECK(omega0_scaled(0.4e9, 1.76 / 3.95) == doctest::Approx(2.67e8).epsilon(1e-3));
  CHECK(omega0_scaled(0.4e9, 1.0) == 0.4e9);
  CHECK(omega0_scaled(0.4e9, 4.0) == 0.8e9);
  CHECK_THROWS_AS(chi_scaled(0.5, 1.0), ConfigError);
  CHECK_THROWS_AS(omega0_scaled(0.4e9, 0.0), ConfigError);
  CHECK_THROWS_AS(chi_from_geometry({1.0, 0.0, k, {}}), ConfigError);
}

TEST_CASE("overdamped and invalid parameters are rejected") {
  CHECK_THROWS_AS(WavepacketParams(0.5 * 4.0 * kNaturalLinewidth, 4.0), RegimeError);
  CHECK_THROWS_AS(WavepacketParams(0.1e9, 10.0), RegimeError);
  CHECK_THROWS_AS(WavepacketParams(0.4e9, 0.5), ConfigError);
  CHECK_THROWS_AS(WavepacketParams(0.4e9, 4.0, -1.0), ConfigError);
  CHECK_THROWS_AS(WavepacketParams(0.4e9, 4.0, kNaturalLinewidth, 0.0), ConfigError);
  CHECK(model_from_string("delay") == WavepacketModel::delay);
  CHECK_THROWS_AS(model_from_string("eq4"), ConfigError);
}

TEST_CASE("flat background is renormalized over the window") {
  const ReadWindowBackground bg{0.2, kDefaultReadWindow};
  const double area = quad::integrate([&](double t) { return single_photon_pdf(kReference, t, bg); }, 0.0,
                                      kDefaultReadWindow, 1e-9);
  CHECK(area == doctest::Approx(1.0 - 0.8 * single_photon_survival(kReference, kDefaultReadWindow))
                    .epsilon(1e-10));
  CHECK(single_photon_pdf(kReference, 0.0, bg) == doctest::Approx(0.2 / kDefaultReadWindow));
  CHECK(single_photon_pdf(kReference, 1e-6, bg) < 1e-20);
  CHECK_THROWS_AS((ReadWindowBackground{1.5, kDefaultReadWindow}.validate()), ConfigError);
}
