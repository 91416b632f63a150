#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace fockrad {

inline constexpr double kPi = 3.14159265358979323846;
// Natural linewidth of the excited level, Gamma = 2 pi x 6.065 MHz (rad/s).
inline constexpr double kNaturalLinewidth = 2.0 * kPi * 6.065e6;
inline constexpr double kDefaultBinWidth = 0.5e-9;  // s
inline constexpr double kDefaultReadWindow = 190e-9;  // s

// Read-out parameters of a superradiant wavepacket. Only the underdamped
// regime omega0 > chi * gamma / 2 is representable.
class WavepacketParams {
 public:
  WavepacketParams(double omega0, double chi, double gamma = kNaturalLinewidth,
                   double dt = kDefaultBinWidth);

  double gamma() const { return gamma_; }
  double omega0() const { return omega0_; }
  double chi() const { return chi_; }
  double dt() const { return dt_; }

  // chi * Gamma: collective decay rate of the excited state.
  double decay_rate() const { return chi_ * gamma_; }
  // Shifted Rabi frequency sqrt(omega0^2 - (chi Gamma)^2 / 4).
  double omega() const { return omega_; }
  // chi Gamma omega0^2 / omega^2, the normalization of the single-photon density.
  double alpha() const { return decay_rate() * omega0_ * omega0_ / (omega_ * omega_); }

 private:
  double gamma_;
  double omega0_;
  double chi_;
  double dt_;
  double omega_;
};

enum class WavepacketModel { single_photon, first_photon, delay };

std::string_view to_string(WavepacketModel model);
WavepacketModel model_from_string(std::string_view name);

// Closed-form constants of the two-photon marginals as usually quoted:
// a1 = 2 alpha dt, b1 = chi Gamma Omega / 2 omega0^2, c1 = (chi Gamma)^2 / 4 omega0^2,
// a_tau = alpha dt omega0^2 / (2 Omega^2 + 2 (chi Gamma)^2),
// b_tau = (6 Omega^2 - 4 omega0^2) / 4 omega0^2, c_tau = 3 Omega chi Gamma / 4 omega0^2.
// a_tau / dt normalizes the delay density; a1 does not normalize the
// first-photon density (see first_photon_pdf).
struct MarginalConstants {
  double a1, b1, c1;
  double a_tau, b_tau, c_tau;
};
MarginalConstants marginal_constants(const WavepacketParams& params);

// Normalized probability densities in 1/s, zero for negative arguments.
double single_photon_pdf(const WavepacketParams& params, double t);
double single_photon_cdf(const WavepacketParams& params, double t);
// 1 - cdf, evaluated without cancellation.
double single_photon_survival(const WavepacketParams& params, double t);
// Independent emission: p(t1) p(t2).
double biphoton_joint_pdf(const WavepacketParams& params, double t1, double t2);
// Earlier photon of the pair at t1: (2 alpha^2 / chi Gamma) e^{-chi Gamma t1}
// sin^2(Omega t1 / 2) [1 + b1 sin(Omega t1) - c1 cos(Omega t1)].
double first_photon_pdf(const WavepacketParams& params, double t1);
// Delay between the two photons: e^{-chi Gamma tau / 2}
// [1 + b_tau cos(Omega tau) + c_tau sin(Omega tau)] / normalization.
double delay_pdf(const WavepacketParams& params, double tau);

double model_pdf(const WavepacketParams& params, WavepacketModel model, double t);
// Pure exponential decay with the model's prefactor (plotted as a guide).
double envelope_pdf(const WavepacketParams& params, WavepacketModel model, double t);
// Exponential rate of the model's envelope: chi Gamma / 2, chi Gamma, chi Gamma / 2.
double envelope_rate(const WavepacketParams& params, WavepacketModel model);

// Probability per detection bin: pdf * dt.
inline double single_photon_density(const WavepacketParams& params, double t) {
  return single_photon_pdf(params, t) * params.dt();
}
inline double biphoton_joint_density(const WavepacketParams& params, double t1, double t2) {
  return biphoton_joint_pdf(params, t1, t2) * params.dt() * params.dt();
}
inline double first_photon_density(const WavepacketParams& params, double t1) {
  return first_photon_pdf(params, t1) * params.dt();
}
inline double delay_density(const WavepacketParams& params, double tau) {
  return delay_pdf(params, tau) * params.dt();
}

struct EnsembleGeometry {
  double n_atoms = 0.0;
  double waist = 0.0;       // mode waist radius, m
  double wavenumber = 0.0;  // 1/m
  std::optional<double> optical_depth;
};

// chi ~ 1 + N / (w0^2 k^2).
double chi_from_geometry(const EnsembleGeometry& geometry);
// chi - 1 scales linearly with atom number, hence with optical depth.
double chi_scaled(double chi1, double od_ratio);
// Rabi frequency scales with the square root of read power.
double omega0_scaled(double omega0_ref, double power_ratio);

// Optional flat background spread uniformly over the read window.
struct ReadWindowBackground {
  double fraction = 0.0;
  double window = kDefaultReadWindow;

  void validate() const;
};
double single_photon_pdf(const WavepacketParams& params, double t,
                         const ReadWindowBackground& background);

// Inverse-CDF sampler for the single-photon density. The quantile function
// is a monotone cubic Hermite interpolant on an adaptively refined grid
// such that |cdf(quantile(u)) - u| stays below the requested tolerance.
// Immutable after construction.
class TimeSampler {
 public:
  explicit TimeSampler(const WavepacketParams& params, double cdf_tolerance = 1e-8);
  ~TimeSampler();
  TimeSampler(const TimeSampler&);
  TimeSampler& operator=(const TimeSampler&);

  double quantile(double u) const;
  const WavepacketParams& params() const { return params_; }
  double t_max() const { return t_max_; }
  std::size_t nodes() const { return node_count_; }

 private:
  struct Table;
  WavepacketParams params_;
  double t_max_ = 0.0;
  double cdf_max_ = 1.0;
  std::size_t node_count_ = 0;
  std::shared_ptr<const Table> table_;
};

struct BiphotonSample {
  double first;
  double second;
  double delay() const { return second - first; }
};

// Sample k uses random stream (seed, k), so the OpenMP and serial versions
// return identical sequences.
std::vector<double> sample_times(const TimeSampler& sampler, std::size_t count,
                                 std::uint64_t seed, const ReadWindowBackground& background = {});
std::vector<double> sample_times_serial(const TimeSampler& sampler, std::size_t count,
                                        std::uint64_t seed,
                                        const ReadWindowBackground& background = {});
std::vector<double> sample_times(const WavepacketParams& params, std::size_t count,
                                 std::uint64_t seed);

// Two independent draws per pair, reported ordered.
std::vector<BiphotonSample> sample_biphotons(const TimeSampler& sampler, std::size_t count,
                                             std::uint64_t seed);
std::vector<BiphotonSample> sample_biphotons_serial(const TimeSampler& sampler,
                                                    std::size_t count, std::uint64_t seed);

}  // namespace fockrad
