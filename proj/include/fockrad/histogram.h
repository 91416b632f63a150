#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

namespace fockrad {

// Binned detection times. Edges in seconds.
struct Histogram {
  std::vector<double> edges;
  std::vector<std::uint64_t> counts;
  std::uint64_t total = 0;  // conditioning events (normalization of the "normalized" column)

  std::size_t bins() const { return counts.size(); }
  double center(std::size_t k) const { return 0.5 * (edges[k] + edges[k + 1]); }
  double width(std::size_t k) const { return edges[k + 1] - edges[k]; }
  std::size_t nonempty_bins() const;
  void validate() const;
};

// Uniform bins on [lo, hi); samples outside are dropped but still counted
// in `total`.
Histogram make_histogram(std::span<const double> samples, double lo, double hi, std::size_t bins);

// CSV schema (v1):
//   # fockrad histogram v1
//   # bin_width_ns=<w>
//   # total=<events>
//   bin_start_ns,counts,normalized
// One row per bin. On read, the comment lines are optional: the width of the
// last bin is then taken from the spacing of the last two starts, and the
// total from the sum of counts.
void write_histogram_csv(std::ostream& out, const Histogram& histogram);
Histogram read_histogram_csv(std::istream& in);

}  // namespace fockrad
