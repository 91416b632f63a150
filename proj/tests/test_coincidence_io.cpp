#include "doctest.h"

#include <cmath>
#include <cstring>
#include <random>
#include <sstream>

#include "fockrad/coincidence_table.h"
#include "fockrad/detection.h"
#include "fockrad/errors.h"
#include "fockrad/number_format.h"
#include "fockrad/trial_simulator.h"

using namespace fockrad;

namespace {

bool same_bits(double a, double b) {
  if (std::isnan(a) && std::isnan(b)) return true;
  return std::memcmp(&a, &b, sizeof a) == 0;
}

void check_same(const CoincidenceTable& a, const CoincidenceTable& b) {
  CHECK(same_bits(a.p, b.p));
  CHECK(same_bits(a.p1, b.p1));
  REQUIRE(a.field2_leaves == b.field2_leaves);
  for (std::size_t k = 0; k < a.probability.size(); ++k) {
    CHECK(same_bits(a.probability[k], b.probability[k]));
    CHECK(same_bits(a.sigma[k], b.sigma[k]));
  }
}

std::vector<CoincidenceTable> sample_tables() {
  const DetectionTree f1 = DetectionTree::balanced(2, {0.3, 0.0});
  const DetectionTree f2 = DetectionTree::balanced(4, {0.1, 1e-4});
  std::vector<CoincidenceTable> tables;
  tables.push_back(coincidence_table_exact(PairSource(0.0), f1, f2));  // NaN rows
  tables.push_back(coincidence_table_exact(PairSource(0.037), f1, f2));
  tables.push_back(run_trials({PairSource(0.02), f1, f2, 200000, 9}));
  tables.push_back(coincidence_table_exact(PairSource(0.01), f1, DetectionTree::balanced(3, {})));
  return tables;
}

}  // namespace

TEST_CASE("format_double round-trips bit-exactly") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 10000; ++k) {
    double v;
    const std::uint64_t bits = rng();
    std::memcpy(&v, &bits, sizeof v);
    if (!std::isfinite(v)) continue;
    CHECK(same_bits(parse_double(format_double(v), "v"), v));
  }
  CHECK(format_double(std::nan("")) == "nan");
  CHECK(format_double(0.1) == "0.1");
  CHECK_THROWS_AS(parse_double("0.1x", "v"), ConfigError);
  CHECK_THROWS_AS(parse_double("", "v"), ConfigError);
  CHECK_THROWS_AS(parse_int("3.5", "v"), ConfigError);
}

TEST_CASE("CSV round trip is bit-exact") {
  const auto tables = sample_tables();
  std::ostringstream out;
  write_tables_csv(out, tables, {{"seed", "9"}, {"engine", "exact"}});
  std::istringstream in(out.str());
  RunMetadata meta;
  const auto back = read_tables_csv(in, &meta);
  REQUIRE(back.size() == tables.size());
  for (std::size_t k = 0; k < tables.size(); ++k) check_same(tables[k], back[k]);
  CHECK(meta.at("seed") == "9");
  CHECK(meta.at("engine") == "exact");

  std::ostringstream again;
  write_tables_csv(again, back, meta);
  CHECK(again.str() == out.str());
}

TEST_CASE("CSV layout") {
  CoincidenceTable t(1);
  t.p = 0.5;
  t.p1 = 0.25;
  t.at(0, 0) = 1.0;
  t.at(1, 1) = 1.0;
  t.at(2, 0) = CoincidenceTable::unavailable();
  t.at(2, 1) = CoincidenceTable::unavailable();
  std::ostringstream out;
  write_tables_csv(out, {t});
  CHECK(out.str() ==
        "# fockrad coincidence table v1\n"
        "p,p1,i,j,P_ij,sigma\n"
        "0.5,0.25,0,0,1,0\n"
        "0.5,0.25,0,1,0,0\n"
        "0.5,0.25,1,0,0,0\n"
        "0.5,0.25,1,1,1,0\n"
        "0.5,0.25,2,0,nan,0\n"
        "0.5,0.25,2,1,nan,0\n");
}

TEST_CASE("JSON round trip is bit-exact and keeps counts") {
  const auto tables = sample_tables();
  std::ostringstream out;
  write_tables_json(out, tables, {{"seed", "9"}});
  std::istringstream in(out.str());
  RunMetadata meta;
  const auto back = read_tables_json(in, &meta);
  REQUIRE(back.size() == tables.size());
  for (std::size_t k = 0; k < tables.size(); ++k) {
    check_same(tables[k], back[k]);
    CHECK(back[k].trials == tables[k].trials);
    CHECK(back[k].counts == tables[k].counts);
    CHECK(back[k].herald_counts == tables[k].herald_counts);
  }
  CHECK(meta.at("seed") == "9");
  CHECK(out.str().find("NaN") == std::string::npos);
}

TEST_CASE("malformed tables are rejected") {
  std::istringstream no_header("0.5,0.25,0,0,1,0\n");
  CHECK_THROWS_AS(read_tables_csv(no_header), ConfigError);
  std::istringstream short_row("p,p1,i,j,P_ij,sigma\n0.5,0.25,0,0\n");
  CHECK_THROWS_AS(read_tables_csv(short_row), ConfigError);
  std::istringstream incomplete("p,p1,i,j,P_ij,sigma\n0.5,0.25,0,0,1,0\n0.5,0.25,0,1,0,0\n");
  CHECK_THROWS_AS(read_tables_csv(incomplete), ConfigError);
  std::istringstream garbage("{not json");
  CHECK_THROWS_AS(read_tables_json(garbage), ConfigError);
  std::istringstream wrong_schema(R"({"schema": "other"})");
  CHECK_THROWS_AS(read_tables_json(wrong_schema), ConfigError);
}
