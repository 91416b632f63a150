// Serial reference vs OpenMP kernels. Usage: bench_parallel [trials] [samples]
#include <chrono>
#include <cstdio>
#include <cstdlib>

#include <omp.h>

#include "fockrad/trial_simulator.h"
#include "fockrad/wavepacket.h"

using namespace fockrad;

namespace {

template <class F>
double seconds(F&& f) {
  const auto start = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::uint64_t trials = argc > 1 ? std::strtoull(argv[1], nullptr, 10) : 10'000'000;
  const std::size_t samples = argc > 2 ? std::strtoull(argv[2], nullptr, 10) : 2'000'000;
  std::printf("threads: %d\n", omp_get_max_threads());

  const TrialConfig config{PairSource(0.05), DetectionTree::balanced(2, {0.3, 0.0}),
                           DetectionTree::balanced(4, {0.1, 0.0}), trials, 7};
  CoincidenceTable serial, parallel;
  const double ts = seconds([&] { serial = run_trials_serial(config); });
  const double tp = seconds([&] { parallel = run_trials(config); });
  std::printf("run_trials     %llu trials: serial %.3f s, openmp %.3f s, speedup %.2f, identical %s\n",
              static_cast<unsigned long long>(trials), ts, tp, ts / tp,
              serial.counts == parallel.counts ? "yes" : "NO");

  const TimeSampler sampler(WavepacketParams(0.4e9, 4.0));
  std::vector<double> a, b;
  const double ss = seconds([&] { a = sample_times_serial(sampler, samples, 11); });
  const double sp = seconds([&] { b = sample_times(sampler, samples, 11); });
  std::printf("sample_times   %zu samples: serial %.3f s, openmp %.3f s, speedup %.2f, identical %s\n",
              samples, ss, sp, ss / sp, a == b ? "yes" : "NO");
  return serial.counts == parallel.counts && a == b ? 0 : 1;
}
