#include "fockrad/coincidence_table.h"

#include <istream>
#include <ostream>
#include <sstream>

#include "fockrad/errors.h"
#include "fockrad/number_format.h"

namespace fockrad {

namespace {

constexpr const char* kCsvHeader = "p,p1,i,j,P_ij,sigma";
constexpr const char* kJsonSchema = "fockrad.coincidence_tables/1";

std::vector<std::string_view> split(std::string_view line, char sep) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(sep, start);
    fields.push_back(line.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return fields;
}

// JSON has no NaN; unavailable entries travel as null.
nlohmann::json number_or_null(double v) {
  return std::isnan(v) ? nlohmann::json(nullptr) : nlohmann::json(v);
}

double number_from(const nlohmann::json& v) {
  return v.is_null() ? CoincidenceTable::unavailable() : v.get<double>();
}

}  // namespace

void write_tables_csv(std::ostream& out, const std::vector<CoincidenceTable>& tables,
                      const RunMetadata& metadata) {
  out << "# fockrad coincidence table v1\n";
  for (const auto& [key, value] : metadata) out << "# " << key << '=' << value << '\n';
  out << kCsvHeader << '\n';
  for (const auto& t : tables) {
    const std::string p = format_double(t.p);
    const std::string p1 = format_double(t.p1);
    for (std::size_t i = 0; i < kHeraldRows; ++i) {
      for (std::size_t j = 0; j < t.columns(); ++j) {
        out << p << ',' << p1 << ',' << i << ',' << j << ',' << format_double(t.at(i, j)) << ','
            << format_double(t.sigma_at(i, j)) << '\n';
      }
    }
  }
}

std::vector<CoincidenceTable> read_tables_csv(std::istream& in, RunMetadata* metadata) {
  struct Row {
    double p, p1;
    std::size_t i, j;
    double value, sigma;
  };
  std::vector<std::vector<Row>> groups;
  std::string line;
  bool header_seen = false;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view view = trim(line);
    if (view.empty()) continue;
    if (view.front() == '#') {
      const auto eq = view.find('=');
      if (metadata && eq != std::string_view::npos) {
        (*metadata)[std::string(trim(view.substr(1, eq - 1)))] =
            std::string(trim(view.substr(eq + 1)));
      }
      continue;
    }
    if (!header_seen) {
      if (view != kCsvHeader) {
        throw ConfigError("table CSV: expected header '" + std::string(kCsvHeader) + "'");
      }
      header_seen = true;
      continue;
    }
    const auto fields = split(view, ',');
    if (fields.size() != 6) {
      throw ConfigError("table CSV line " + std::to_string(line_no) + ": expected 6 fields");
    }
    Row row{parse_double(fields[0], "p"),
            parse_double(fields[1], "p1"),
            static_cast<std::size_t>(parse_int(fields[2], "i")),
            static_cast<std::size_t>(parse_int(fields[3], "j")),
            parse_double(fields[4], "P_ij"),
            parse_double(fields[5], "sigma")};
    if (row.i >= kHeraldRows) throw ConfigError("table CSV: herald index out of range");
    // A new table starts whenever (i, j) restarts at (0, 0).
    if (groups.empty() || (row.i == 0 && row.j == 0)) groups.emplace_back();
    groups.back().push_back(row);
  }
  if (!header_seen) throw ConfigError("table CSV: missing header");

  std::vector<CoincidenceTable> tables;
  for (const auto& rows : groups) {
    std::size_t max_j = 0;
    for (const auto& r : rows) max_j = std::max(max_j, r.j);
    if (rows.size() != kHeraldRows * (max_j + 1)) {
      throw ConfigError("table CSV: incomplete table for p=" + format_double(rows.front().p));
    }
    CoincidenceTable t(max_j);
    t.p = rows.front().p;
    t.p1 = rows.front().p1;
    for (const auto& r : rows) {
      t.at(r.i, r.j) = r.value;
      t.sigma_at(r.i, r.j) = r.sigma;
    }
    tables.push_back(std::move(t));
  }
  return tables;
}

nlohmann::json table_to_json(const CoincidenceTable& t) {
  nlohmann::json j;
  j["p"] = t.p;
  j["p1"] = t.p1;
  j["field2_leaves"] = t.field2_leaves;
  auto& rows = j["P"] = nlohmann::json::array();
  auto& sig = j["sigma"] = nlohmann::json::array();
  for (std::size_t i = 0; i < kHeraldRows; ++i) {
    auto row = nlohmann::json::array();
    auto srow = nlohmann::json::array();
    for (std::size_t c = 0; c < t.columns(); ++c) {
      row.push_back(number_or_null(t.at(i, c)));
      srow.push_back(number_or_null(t.sigma_at(i, c)));
    }
    rows.push_back(row);
    sig.push_back(srow);
  }
  j["herald_probability"] = t.herald_probability;
  j["trials"] = t.trials;
  if (t.trials > 0) {
    j["herald_counts"] = t.herald_counts;
    j["counts"] = t.counts;
  }
  return j;
}

CoincidenceTable table_from_json(const nlohmann::json& j) {
  try {
    CoincidenceTable t(j.at("field2_leaves").get<std::size_t>());
    t.p = j.at("p").get<double>();
    t.p1 = j.at("p1").get<double>();
    const auto& rows = j.at("P");
    const auto& sig = j.at("sigma");
    if (rows.size() != kHeraldRows || sig.size() != kHeraldRows) {
      throw ConfigError("table JSON: expected 3 herald rows");
    }
    for (std::size_t i = 0; i < kHeraldRows; ++i) {
      if (rows[i].size() != t.columns() || sig[i].size() != t.columns()) {
        throw ConfigError("table JSON: row width does not match field2_leaves");
      }
      for (std::size_t c = 0; c < t.columns(); ++c) {
        t.at(i, c) = number_from(rows[i][c]);
        t.sigma_at(i, c) = number_from(sig[i][c]);
      }
    }
    t.herald_probability = j.at("herald_probability").get<std::array<double, kHeraldRows>>();
    t.trials = j.value("trials", std::uint64_t{0});
    if (t.trials > 0) {
      t.herald_counts = j.at("herald_counts").get<std::array<std::uint64_t, kHeraldRows>>();
      t.counts = j.at("counts").get<std::vector<std::uint64_t>>();
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("table JSON: ") + e.what());
  }
}

void write_tables_json(std::ostream& out, const std::vector<CoincidenceTable>& tables,
                       const RunMetadata& metadata) {
  nlohmann::json doc;
  doc["schema"] = kJsonSchema;
  doc["metadata"] = metadata;
  auto& arr = doc["tables"] = nlohmann::json::array();
  for (const auto& t : tables) arr.push_back(table_to_json(t));
  out << doc.dump(2) << '\n';
}

std::vector<CoincidenceTable> read_tables_json(std::istream& in, RunMetadata* metadata) {
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("table JSON: ") + e.what());
  }
  if (doc.value("schema", "") != kJsonSchema) throw ConfigError("table JSON: unknown schema");
  if (metadata && doc.contains("metadata")) {
    *metadata = doc["metadata"].get<RunMetadata>();
  }
  std::vector<CoincidenceTable> tables;
  for (const auto& t : doc.at("tables")) tables.push_back(table_from_json(t));
  return tables;
}

}  // namespace fockrad
