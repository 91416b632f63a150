#include "fockrad/wavepacket.h"

#include <cmath>
#include <string>

#include "fockrad/errors.h"

namespace fockrad {

WavepacketParams::WavepacketParams(double omega0, double chi, double gamma, double dt)
    : gamma_(gamma), omega0_(omega0), chi_(chi), dt_(dt), omega_(0.0) {
  if (!(gamma > 0.0)) throw ConfigError("wavepacket: gamma must be > 0");
  if (!(chi >= 1.0)) throw ConfigError("wavepacket: chi must be >= 1");
  if (!(dt > 0.0)) throw ConfigError("wavepacket: bin width dt must be > 0");
  const double half_decay = 0.5 * chi * gamma;
  if (!(omega0 > half_decay)) {
    throw RegimeError("wavepacket: omega0=" + std::to_string(omega0) +
                      " rad/s is not above chi*Gamma/2=" + std::to_string(half_decay) +
                      " rad/s (overdamped)");
  }
  omega_ = std::sqrt(omega0 * omega0 - half_decay * half_decay);
}

std::string_view to_string(WavepacketModel model) {
  switch (model) {
    case WavepacketModel::single_photon: return "single";
    case WavepacketModel::first_photon: return "first";
    case WavepacketModel::delay: return "delay";
  }
  return "single";
}

WavepacketModel model_from_string(std::string_view name) {
  if (name == "single") return WavepacketModel::single_photon;
  if (name == "first") return WavepacketModel::first_photon;
  if (name == "delay") return WavepacketModel::delay;
  throw ConfigError("unknown wavepacket model '" + std::string(name) +
                    "' (expected single, first or delay)");
}

MarginalConstants marginal_constants(const WavepacketParams& params) {
  const double k = params.decay_rate();
  const double w = params.omega();
  const double w0sq = params.omega0() * params.omega0();
  const double alpha = params.alpha();
  const double dt = params.dt();
  MarginalConstants c{};
  c.a1 = 2.0 * alpha * dt;
  c.b1 = k * w / (2.0 * w0sq);
  c.c1 = k * k / (4.0 * w0sq);
  c.a_tau = alpha * dt * w0sq / (2.0 * w * w + 2.0 * k * k);
  c.b_tau = (6.0 * w * w - 4.0 * w0sq) / (4.0 * w0sq);
  c.c_tau = 3.0 * w * k / (4.0 * w0sq);
  return c;
}

double single_photon_pdf(const WavepacketParams& params, double t) {
  if (t < 0.0) return 0.0;
  const double s = std::sin(0.5 * params.omega() * t);
  return params.alpha() * std::exp(-0.5 * params.decay_rate() * t) * s * s;
}

double single_photon_survival(const WavepacketParams& params, double t) {
  if (t <= 0.0) return 1.0;
  const double a = 0.5 * params.decay_rate();
  const double w = params.omega();
  const double w0sq = params.omega0() * params.omega0();
  const double bracket = 1.0 - (a * a / w0sq) * std::cos(w * t) + (a * w / w0sq) * std::sin(w * t);
  return params.alpha() / (2.0 * a) * std::exp(-a * t) * bracket;
}

double single_photon_cdf(const WavepacketParams& params, double t) {
  return 1.0 - single_photon_survival(params, t);
}

double biphoton_joint_pdf(const WavepacketParams& params, double t1, double t2) {
  return single_photon_pdf(params, t1) * single_photon_pdf(params, t2);
}

double first_photon_pdf(const WavepacketParams& params, double t1) {
  if (t1 < 0.0) return 0.0;
  const MarginalConstants c = marginal_constants(params);
  const double k = params.decay_rate();
  const double w = params.omega();
  const double norm = 2.0 * params.alpha() * params.alpha() / k;
  const double s = std::sin(0.5 * w * t1);
  return norm * std::exp(-k * t1) * s * s *
         (1.0 + c.b1 * std::sin(w * t1) - c.c1 * std::cos(w * t1));
}

namespace {

double delay_normalization(const WavepacketParams& params, const MarginalConstants& c) {
  const double a = 0.5 * params.decay_rate();
  const double w0sq = params.omega0() * params.omega0();
  return 1.0 / a + (c.b_tau * a + c.c_tau * params.omega()) / w0sq;
}

}  // namespace

double delay_pdf(const WavepacketParams& params, double tau) {
  if (tau < 0.0) return 0.0;
  const MarginalConstants c = marginal_constants(params);
  const double w = params.omega();
  return std::exp(-0.5 * params.decay_rate() * tau) *
         (1.0 + c.b_tau * std::cos(w * tau) + c.c_tau * std::sin(w * tau)) /
         delay_normalization(params, c);
}

double model_pdf(const WavepacketParams& params, WavepacketModel model, double t) {
  switch (model) {
    case WavepacketModel::single_photon: return single_photon_pdf(params, t);
    case WavepacketModel::first_photon: return first_photon_pdf(params, t);
    case WavepacketModel::delay: return delay_pdf(params, t);
  }
  return 0.0;
}

double envelope_rate(const WavepacketParams& params, WavepacketModel model) {
  return model == WavepacketModel::first_photon ? params.decay_rate()
                                                : 0.5 * params.decay_rate();
}

double envelope_pdf(const WavepacketParams& params, WavepacketModel model, double t) {
  if (t < 0.0) return 0.0;
  double prefactor = 0.0;
  switch (model) {
    case WavepacketModel::single_photon: prefactor = params.alpha(); break;
    case WavepacketModel::first_photon:
      prefactor = 2.0 * params.alpha() * params.alpha() / params.decay_rate();
      break;
    case WavepacketModel::delay:
      prefactor = 1.0 / delay_normalization(params, marginal_constants(params));
      break;
  }
  return prefactor * std::exp(-envelope_rate(params, model) * t);
}

double chi_from_geometry(const EnsembleGeometry& g) {
  if (!(g.n_atoms >= 0.0) || !(g.waist > 0.0) || !(g.wavenumber > 0.0)) {
    throw ConfigError("ensemble geometry: need N >= 0 and positive waist and wavenumber");
  }
  const double wk = g.waist * g.wavenumber;
  return 1.0 + g.n_atoms / (wk * wk);
}

double chi_scaled(double chi1, double od_ratio) {
  if (!(chi1 >= 1.0) || !(od_ratio > 0.0)) {
    throw ConfigError("chi_scaled: need chi1 >= 1 and od_ratio > 0");
  }
  return 1.0 + (chi1 - 1.0) * od_ratio;
}

double omega0_scaled(double omega0_ref, double power_ratio) {
  if (!(power_ratio > 0.0)) throw ConfigError("omega0_scaled: power ratio must be > 0");
  return omega0_ref * std::sqrt(power_ratio);
}

void ReadWindowBackground::validate() const {
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ConfigError("background: fraction must lie in [0, 1]");
  }
  if (!(window > 0.0)) throw ConfigError("background: read window must be > 0");
}

double single_photon_pdf(const WavepacketParams& params, double t,
                         const ReadWindowBackground& background) {
  const double flat = (t >= 0.0 && t <= background.window) ? 1.0 / background.window : 0.0;
  return (1.0 - background.fraction) * single_photon_pdf(params, t) + background.fraction * flat;
}

}  // namespace fockrad
