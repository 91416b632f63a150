#include "fockrad/config.h"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "fockrad/errors.h"
#include "fockrad/number_format.h"
#include "fockrad/trial_simulator.h"

namespace fockrad {

namespace pt = boost::property_tree;

std::string_view to_string(Engine engine) {
  switch (engine) {
    case Engine::exact: return "exact";
    case Engine::mc: return "mc";
    case Engine::both: return "both";
  }
  return "both";
}

std::string_view to_string(OutputFormat format) {
  return format == OutputFormat::json ? "json" : "csv";
}

Engine engine_from_string(std::string_view name) {
  if (name == "exact") return Engine::exact;
  if (name == "mc") return Engine::mc;
  if (name == "both") return Engine::both;
  throw ConfigError("unknown engine '" + std::string(name) + "' (expected exact, mc or both)");
}

OutputFormat format_from_string(std::string_view name) {
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  throw ConfigError("unknown format '" + std::string(name) + "' (expected csv or json)");
}

DetectionTree TreeConfig::build() const {
  if (leaves == 0) throw ConfigError("tree: leaves must be >= 1");
  auto per_leaf = [&](const std::vector<double>& v, const char* what) {
    if (v.size() == 1) return std::vector<double>(leaves, v.front());
    if (v.size() != leaves) {
      throw ConfigError(std::string("tree: ") + what + " needs 1 or " + std::to_string(leaves) +
                        " values");
    }
    return v;
  };
  const auto eff = per_leaf(efficiency, "efficiency");
  const auto dark = per_leaf(dark_prob, "dark_prob");
  std::vector<DetectorModel> detectors;
  for (std::size_t l = 0; l < leaves; ++l) detectors.push_back({eff[l], dark[l]});
  std::vector<double> route = routing.empty()
                                  ? std::vector<double>(leaves, 1.0 / static_cast<double>(leaves))
                                  : per_leaf(routing, "routing");
  return DetectionTree(std::move(detectors), std::move(route));
}

namespace {

std::vector<double> parse_list(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (trim(item).empty()) continue;
    values.push_back(parse_double(item, what));
  }
  if (values.empty()) throw ConfigError("config: empty list for " + what);
  return values;
}

std::string render_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (k) out += ", ";
    out += format_double(values[k]);
  }
  return out;
}

std::uint64_t parse_count(const std::string& text, const std::string& what) {
  // Plain integers, or 1e6-style values that are exact non-negative integers.
  if (text.find_first_of(".eE") == std::string::npos) {
    const long long i = parse_int(text, what);
    if (i < 0) throw ConfigError("config: " + what + " must be >= 0");
    return static_cast<std::uint64_t>(i);
  }
  const double v = parse_double(text, what);
  if (!(v >= 0.0) || v != std::floor(v) || v > 9.007199254740992e15) {
    throw ConfigError("config: " + what + " must be a non-negative integer");
  }
  return static_cast<std::uint64_t>(v);
}

bool parse_bool(const std::string& text, const std::string& what) {
  const auto t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw ConfigError("config: cannot parse '" + std::string(t) + "' as a boolean for " + what);
}

class SectionReader {
 public:
  SectionReader(const pt::ptree& root, std::string name) : name_(std::move(name)) {
    if (auto child = root.get_child_optional(name_)) section_ = &*child;
  }

  const std::string* get(const std::string& key) {
    seen_.insert(key);
    if (!section_) return nullptr;
    auto v = section_->get_child_optional(key);
    if (!v) return nullptr;
    return &v->data();
  }

  std::string where(const std::string& key) const { return "[" + name_ + "] " + key; }

  void reject_unknown() const {
    if (!section_) return;
    for (const auto& [key, _] : *section_) {
      if (!seen_.count(key)) throw ConfigError("config: unknown key " + where(key));
    }
  }

 private:
  std::string name_;
  const pt::ptree* section_ = nullptr;
  std::set<std::string> seen_;
};

void read_tree(const pt::ptree& root, const std::string& name, TreeConfig& tree) {
  SectionReader r(root, name);
  if (auto v = r.get("leaves")) tree.leaves = parse_count(*v, r.where("leaves"));
  if (auto v = r.get("efficiency")) tree.efficiency = parse_list(*v, r.where("efficiency"));
  if (auto v = r.get("dark_prob")) tree.dark_prob = parse_list(*v, r.where("dark_prob"));
  if (auto v = r.get("routing")) tree.routing = parse_list(*v, r.where("routing"));
  r.reject_unknown();
  tree.build();  // validates
}

}  // namespace

Config parse_config(std::istream& in) {
  pt::ptree root;
  try {
    pt::read_ini(in, root);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  static const std::set<std::string> kSections{"source", "field1",     "field2", "simulation",
                                               "wavepacket", "fit", "output"};
  for (const auto& [name, child] : root) {
    if (!kSections.count(name)) {
      throw ConfigError(child.empty() ? "config: key '" + name + "' outside any section"
                                      : "config: unknown section [" + name + "]");
    }
  }

  Config c;
  {
    SectionReader r(root, "source");
    auto p = r.get("p");
    auto lo = r.get("p_min");
    auto hi = r.get("p_max");
    auto n = r.get("p_points");
    if (p && (lo || hi || n)) throw ConfigError("config: give either [source] p or p_min/p_max/p_points");
    if (p) c.statistics.p_values = parse_list(*p, r.where("p"));
    if (lo || hi || n) {
      if (!(lo && hi && n)) throw ConfigError("config: p_min, p_max and p_points go together");
      c.statistics.p_values = log_spaced(parse_double(*lo, r.where("p_min")),
                                         parse_double(*hi, r.where("p_max")),
                                         parse_count(*n, r.where("p_points")));
    }
    r.reject_unknown();
    for (double v : c.statistics.p_values) {
      if (!(v >= 0.0 && v < 1.0)) throw ConfigError("config: [source] p values must be in [0, 1)");
    }
  }
  read_tree(root, "field1", c.statistics.field1);
  read_tree(root, "field2", c.statistics.field2);
  {
    SectionReader r(root, "simulation");
    if (auto v = r.get("trials")) c.statistics.trials = parse_count(*v, r.where("trials"));
    if (auto v = r.get("seed")) c.statistics.seed = parse_count(*v, r.where("seed"));
    if (auto v = r.get("engine")) c.statistics.engine = engine_from_string(trim(*v));
    r.reject_unknown();
    if (c.statistics.trials < 1) throw ConfigError("config: [simulation] trials must be >= 1");
  }
  {
    SectionReader r(root, "wavepacket");
    auto& w = c.wavepacket;
    if (auto v = r.get("gamma")) w.gamma = parse_double(*v, r.where("gamma"));
    if (auto v = r.get("dt")) w.dt = parse_double(*v, r.where("dt"));
    if (auto v = r.get("t_max")) w.t_max = parse_double(*v, r.where("t_max"));
    auto omega0 = r.get("omega0");
    auto chi = r.get("chi");
    if (omega0 || chi) {
      std::vector<double> o = omega0 ? parse_list(*omega0, r.where("omega0"))
                                     : std::vector<double>{w.sets.front().omega0};
      std::vector<double> x = chi ? parse_list(*chi, r.where("chi"))
                                  : std::vector<double>{w.sets.front().chi};
      if (o.size() != x.size() && o.size() != 1 && x.size() != 1) {
        throw ConfigError("config: [wavepacket] omega0 and chi lists must match in length");
      }
      const std::size_t n = std::max(o.size(), x.size());
      w.sets.clear();
      for (std::size_t k = 0; k < n; ++k) {
        w.sets.push_back({o[o.size() == 1 ? 0 : k], x[x.size() == 1 ? 0 : k]});
      }
    }
    if (auto v = r.get("samples")) w.samples = parse_count(*v, r.where("samples"));
    if (auto v = r.get("seed")) w.seed = parse_count(*v, r.where("seed"));
    if (auto v = r.get("background_fraction")) {
      w.background_fraction = parse_double(*v, r.where("background_fraction"));
    }
    r.reject_unknown();
    if (!(w.t_max > 0.0) || !(w.dt > 0.0) || w.t_max < w.dt) {
      throw ConfigError("config: [wavepacket] need 0 < dt <= t_max");
    }
    ReadWindowBackground{w.background_fraction, w.t_max}.validate();
  }
  {
    SectionReader r(root, "fit");
    if (auto v = r.get("histogram")) c.fit.histogram = std::string(trim(*v));
    if (auto v = r.get("model")) c.fit.model = model_from_string(trim(*v));
    if (auto v = r.get("restarts")) c.fit.restarts = static_cast<int>(parse_count(*v, r.where("restarts")));
    r.reject_unknown();
  }
  {
    SectionReader r(root, "output");
    if (auto v = r.get("format")) c.output.format = format_from_string(trim(*v));
    if (auto v = r.get("plot")) c.output.plot = parse_bool(*v, r.where("plot"));
    r.reject_unknown();
  }
  return c;
}

Config load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot open " + path.string());
  Config c = parse_config(in);
  // A relative histogram path is taken relative to the config file.
  if (!c.fit.histogram.empty() && std::filesystem::path(c.fit.histogram).is_relative()) {
    c.fit.histogram =
        std::filesystem::absolute(path.parent_path() / c.fit.histogram).lexically_normal().string();
  }
  return c;
}

std::string render_config(const Config& c) {
  std::ostringstream out;
  auto tree = [&](const char* name, const TreeConfig& t) {
    out << "\n[" << name << "]\n";
    out << "leaves = " << t.leaves << '\n';
    out << "efficiency = " << render_list(t.efficiency) << '\n';
    out << "dark_prob = " << render_list(t.dark_prob) << '\n';
    if (!t.routing.empty()) out << "routing = " << render_list(t.routing) << '\n';
  };
  out << "[source]\n";
  out << "p = " << render_list(c.statistics.p_values) << '\n';
  tree("field1", c.statistics.field1);
  tree("field2", c.statistics.field2);
  out << "\n[simulation]\n";
  out << "trials = " << c.statistics.trials << '\n';
  out << "seed = " << c.statistics.seed << '\n';
  out << "engine = " << to_string(c.statistics.engine) << '\n';

  const auto& w = c.wavepacket;
  std::vector<double> omega0, chi;
  for (const auto& s : w.sets) {
    omega0.push_back(s.omega0);
    chi.push_back(s.chi);
  }
  out << "\n[wavepacket]\n";
  out << "gamma = " << format_double(w.gamma) << '\n';
  out << "dt = " << format_double(w.dt) << '\n';
  out << "t_max = " << format_double(w.t_max) << '\n';
  out << "omega0 = " << render_list(omega0) << '\n';
  out << "chi = " << render_list(chi) << '\n';
  out << "samples = " << w.samples << '\n';
  out << "seed = " << w.seed << '\n';
  out << "background_fraction = " << format_double(w.background_fraction) << '\n';

  out << "\n[fit]\n";
  if (!c.fit.histogram.empty()) out << "histogram = " << c.fit.histogram << '\n';
  out << "model = " << to_string(c.fit.model) << '\n';
  out << "restarts = " << c.fit.restarts << '\n';

  out << "\n[output]\n";
  out << "format = " << to_string(c.output.format) << '\n';
  out << "plot = " << (c.output.plot ? "true" : "false") << '\n';
  return out.str();
}

}  // namespace fockrad
