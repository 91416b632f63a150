#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace fockrad {

// Rows i = 0, 1, 2 field-1 clicks.
inline constexpr std::size_t kHeraldRows = 3;

// P_{i,j}: probability of j field-2 clicks given i field-1 clicks, with
// per-entry uncertainty. Rows with no heralds hold NaN ("unavailable").
struct CoincidenceTable {
  explicit CoincidenceTable(std::size_t field2_leaves = 4)
      : field2_leaves(field2_leaves),
        probability(kHeraldRows * (field2_leaves + 1), 0.0),
        sigma(kHeraldRows * (field2_leaves + 1), 0.0) {}

  static double unavailable() { return std::numeric_limits<double>::quiet_NaN(); }

  std::size_t columns() const { return field2_leaves + 1; }
  double& at(std::size_t i, std::size_t j) { return probability[i * columns() + j]; }
  double at(std::size_t i, std::size_t j) const { return probability[i * columns() + j]; }
  double& sigma_at(std::size_t i, std::size_t j) { return sigma[i * columns() + j]; }
  double sigma_at(std::size_t i, std::size_t j) const { return sigma[i * columns() + j]; }
  bool available(std::size_t i) const { return !std::isnan(at(i, 0)); }

  double p = 0.0;   // source excitation probability
  double p1 = 0.0;  // probability of exactly one field-1 click per trial
  std::size_t field2_leaves;
  std::vector<double> probability;
  std::vector<double> sigma;
  std::array<double, kHeraldRows> herald_probability{};

  // Monte Carlo bookkeeping; trials == 0 for exact tables.
  std::uint64_t trials = 0;
  std::array<std::uint64_t, kHeraldRows> herald_counts{};
  std::vector<std::uint64_t> counts;  // same layout as `probability`
};

// Ordered "key=value" lines written as '#' comments above the CSV header.
using RunMetadata = std::map<std::string, std::string>;

// CSV schema (v1): optional '#' comment lines, then the header
//   p,p1,i,j,P_ij,sigma
// and one row per (i, j), tables concatenated in order. Numbers use the
// shortest round-trip decimal form; unavailable entries are "nan".
void write_tables_csv(std::ostream& out, const std::vector<CoincidenceTable>& tables,
                      const RunMetadata& metadata = {});
std::vector<CoincidenceTable> read_tables_csv(std::istream& in, RunMetadata* metadata = nullptr);

nlohmann::json table_to_json(const CoincidenceTable& table);
CoincidenceTable table_from_json(const nlohmann::json& j);
void write_tables_json(std::ostream& out, const std::vector<CoincidenceTable>& tables,
                       const RunMetadata& metadata = {});
std::vector<CoincidenceTable> read_tables_json(std::istream& in, RunMetadata* metadata = nullptr);

}  // namespace fockrad
