#include "fockrad/histogram.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <optional>
#include <ostream>
#include <string>

#include "fockrad/errors.h"
#include "fockrad/number_format.h"

namespace fockrad {

namespace {
constexpr const char* kHeader = "bin_start_ns,counts,normalized";

// Edges are stored in seconds; 12 digits hide the ns <-> s conversion noise.
std::string ns_string(double seconds) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", seconds * 1e9);
  return buf;
}
}

std::size_t Histogram::nonempty_bins() const {
  return static_cast<std::size_t>(
      std::count_if(counts.begin(), counts.end(), [](std::uint64_t c) { return c > 0; }));
}

void Histogram::validate() const {
  if (counts.empty()) throw ConfigError("histogram: no bins");
  if (edges.size() != counts.size() + 1) {
    throw ConfigError("histogram: need bins + 1 edges");
  }
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    if (!(edges[k + 1] > edges[k])) throw ConfigError("histogram: edges must increase strictly");
  }
}

Histogram make_histogram(std::span<const double> samples, double lo, double hi,
                         std::size_t bins) {
  if (!(hi > lo) || bins == 0) throw ConfigError("histogram: need hi > lo and bins >= 1");
  Histogram h;
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t k = 0; k <= bins; ++k) h.edges[k] = lo + width * static_cast<double>(k);
  h.counts.assign(bins, 0);
  h.total = samples.size();
  for (double x : samples) {
    if (!(x >= lo && x < hi)) continue;
    auto k = static_cast<std::size_t>((x - lo) / width);
    if (k >= bins) k = bins - 1;
    ++h.counts[k];
  }
  return h;
}

void write_histogram_csv(std::ostream& out, const Histogram& h) {
  h.validate();
  out << "# fockrad histogram v1\n";
  out << "# bin_width_ns=" << ns_string(h.width(h.bins() - 1)) << '\n';
  out << "# total=" << h.total << '\n';
  out << kHeader << '\n';
  const double total = h.total > 0 ? static_cast<double>(h.total) : 1.0;
  for (std::size_t k = 0; k < h.bins(); ++k) {
    out << ns_string(h.edges[k]) << ',' << h.counts[k] << ','
        << format_double(static_cast<double>(h.counts[k]) / total) << '\n';
  }
}

Histogram read_histogram_csv(std::istream& in) {
  std::optional<double> width_ns;
  std::optional<std::uint64_t> total;
  std::vector<double> starts_ns;
  std::vector<std::uint64_t> counts;
  bool header_seen = false;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      const auto eq = view.find('=');
      if (eq == std::string_view::npos) continue;
      const auto key = trim(view.substr(1, eq - 1));
      const auto value = view.substr(eq + 1);
      if (key == "bin_width_ns") width_ns = parse_double(value, "bin_width_ns");
      if (key == "total") {
        const long long t = parse_int(value, "total");
        if (t < 0) throw ConfigError("histogram CSV: total must be >= 0");
        total = static_cast<std::uint64_t>(t);
      }
      continue;
    }
    if (!header_seen) {
      if (view != kHeader) {
        throw ConfigError("histogram CSV: expected header '" + std::string(kHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto c1 = view.find(',');
    const auto c2 = c1 == std::string_view::npos ? c1 : view.find(',', c1 + 1);
    if (c2 == std::string_view::npos || view.find(',', c2 + 1) != std::string_view::npos) {
      throw ConfigError("histogram CSV line " + std::to_string(line_no) + ": expected 3 fields");
    }
    starts_ns.push_back(parse_double(view.substr(0, c1), "bin_start_ns"));
    const long long c = parse_int(view.substr(c1 + 1, c2 - c1 - 1), "counts");
    if (c < 0) throw ConfigError("histogram CSV: counts must be >= 0");
    counts.push_back(static_cast<std::uint64_t>(c));
    const double normalized = parse_double(view.substr(c2 + 1), "normalized");
    if (!std::isfinite(normalized)) throw ConfigError("histogram CSV: non-finite normalized value");
  }
  if (!header_seen) throw ConfigError("histogram CSV: missing header");
  if (counts.empty()) throw ConfigError("histogram CSV: no bins");
  if (!width_ns) {
    if (starts_ns.size() < 2) throw ConfigError("histogram CSV: cannot infer bin width");
    width_ns = starts_ns[starts_ns.size() - 1] - starts_ns[starts_ns.size() - 2];
  }

  Histogram h;
  h.counts = std::move(counts);
  for (double s : starts_ns) h.edges.push_back(s * 1e-9);
  h.edges.push_back((starts_ns.back() + *width_ns) * 1e-9);
  h.total = total.value_or(std::accumulate(h.counts.begin(), h.counts.end(), std::uint64_t{0}));
  h.validate();
  return h;
}

}  // namespace fockrad
