#include "dam/cli/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <vector>

#include "dam/cli/output.hpp"
#include "json.hpp"

namespace dam::cli {
namespace {

using nlohmann::json;

// One raw value plus where it came from.
struct Entry {
  std::string text;
  json value;  // set for JSON input
  bool from_json = false;
  std::string where;
};

using Section = std::map<std::string, Entry>;
using Document = std::map<std::string, Section>;

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

[[noreturn]] void fail(const std::string& where, const std::string& msg) {
  throw ConfigError(where + ": " + msg);
}

Document parse_ini(const std::string& text, const std::string& origin) {
  Document doc;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    const std::string where = origin + ":" + std::to_string(n);
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') fail(where, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty()) fail(where, "empty section name");
      if (doc.count(section)) fail(where, "section [" + section + "] appears twice");
      doc[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail(where, "expected 'key = value'");
    if (section.empty()) fail(where, "key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) fail(where, "missing key");
    if (value.empty()) fail(where, "missing value for '" + key + "'");
    if (doc[section].count(key)) fail(where, "'" + key + "' set twice in [" + section + "]");
    doc[section][key] = Entry{value, {}, false, where};
  }
  return doc;
}

Document parse_json(const std::string& text, const std::string& origin) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(origin + ": byte " + std::to_string(e.byte) + ": malformed JSON");
  }
  if (!j.is_object()) throw ConfigError(origin + ": top level must be an object");
  Document doc;
  for (auto& [name, body] : j.items()) {
    const std::string where = origin + ":" + name;
    if (!body.is_object()) fail(where, "section must be an object");
    Section& s = doc[name];
    for (auto& [key, v] : body.items()) {
      Entry e;
      e.from_json = true;
      e.value = v;
      e.text = v.is_string() ? v.get<std::string>() : v.dump();
      e.where = where + "." + key;
      s[key] = std::move(e);
    }
  }
  return doc;
}

double to_double(const Entry& e) {
  if (e.from_json && !e.value.is_number() && !e.value.is_string()) fail(e.where, "expected a number");
  const std::string& s = e.text;
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(e.where, "'" + s + "' is not a number");
  if (!std::isfinite(v)) fail(e.where, "value must be finite");
  return v;
}

std::int64_t to_int(const Entry& e) {
  std::int64_t v = 0;
  const std::string& s = e.text;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(e.where, "'" + s + "' is not an integer");
  return v;
}

std::uint64_t to_u64(const Entry& e) {
  std::uint64_t v = 0;
  const std::string& s = e.text;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) fail(e.where, "'" + s + "' is not a nonnegative integer");
  return v;
}

bool to_bool(const Entry& e) {
  if (e.text == "true" || e.text == "1" || e.text == "yes") return true;
  if (e.text == "false" || e.text == "0" || e.text == "no") return false;
  fail(e.where, "'" + e.text + "' is not a boolean");
}

// "1.5" | "piecewise 0:0 3:0.5 6:4" | JSON {"knots": [...], "values": [...]}
PenaltyFn to_penalty(const Entry& e) {
  try {
    if (e.from_json && e.value.is_object()) {
      for (auto& [k, v] : e.value.items())
        if (k != "knots" && k != "values" && k != "bound") fail(e.where, "unknown penalty field '" + k + "'");
      if (!e.value.contains("knots") || !e.value.contains("values")) fail(e.where, "penalty needs knots and values");
      const auto knots = e.value.at("knots").get<std::vector<double>>();
      const auto values = e.value.at("values").get<std::vector<double>>();
      const double bound = e.value.contains("bound") ? e.value.at("bound").get<double>()
                                                     : std::numeric_limits<double>::quiet_NaN();
      return PenaltyFn::piecewise_linear(knots, values, bound);
    }
    std::istringstream in(e.text);
    std::string head;
    in >> head;
    if (head != "piecewise") return PenaltyFn::constant(to_double(e));
    std::vector<double> knots, values;
    std::string pair;
    while (in >> pair) {
      const auto colon = pair.find(':');
      if (colon == std::string::npos) fail(e.where, "penalty knot '" + pair + "' is not knot:value");
      knots.push_back(to_double(Entry{pair.substr(0, colon), {}, false, e.where}));
      values.push_back(to_double(Entry{pair.substr(colon + 1), {}, false, e.where}));
    }
    return PenaltyFn::piecewise_linear(knots, values);
  } catch (const DomainError& err) {
    fail(e.where, err.what());
  } catch (const json::exception&) {
    fail(e.where, "penalty knots and values must be number arrays");
  }
}

// Applies each recognised key; anything left over is an error.
class Reader {
 public:
  Reader(Document doc, std::string origin) : doc_(std::move(doc)), origin_(std::move(origin)) {}

  void section(const std::string& name, const std::map<std::string, std::function<void(const Entry&)>>& keys) {
    auto it = doc_.find(name);
    if (it == doc_.end()) return;
    for (const auto& [key, entry] : it->second) {
      auto k = keys.find(key);
      if (k == keys.end()) fail(entry.where, "unknown key '" + key + "' in [" + name + "]");
      k->second(entry);
      lines_[name + "." + key] = entry.where;
    }
    sections_[name] = it->second.empty() ? origin_ : it->second.begin()->second.where;
    doc_.erase(it);
  }

  void finish() const {
    if (!doc_.empty()) {
      const auto& [name, s] = *doc_.begin();
      fail(s.empty() ? origin_ : s.begin()->second.where, "unknown section [" + name + "]");
    }
  }

  // location of the first key named, else of the section, else the file
  std::string at(std::initializer_list<const char*> keys, const std::string& section) const {
    for (const char* k : keys) {
      auto it = lines_.find(section + "." + k);
      if (it != lines_.end()) return it->second;
    }
    auto s = sections_.find(section);
    return s != sections_.end() ? s->second : origin_;
  }

 private:
  Document doc_;
  std::string origin_;
  std::map<std::string, std::string> lines_;
  std::map<std::string, std::string> sections_;
};

void check(const std::function<void()>& f, const std::string& where, const std::string& what) {
  try {
    f();
  } catch (const DomainError& e) {
    fail(where, what + ": " + e.what());
  }
}

}  // namespace

RunConfig default_config() {
  RunConfig c;
  c.cost = CostParams{1.0, 1.0, 0.5, 0.2, PenaltyFn::constant(1.0), PenaltyFn::constant(1.0)};
  c.simulation.n_cycles = 10000;
  c.simulation.min_total_time = 1e5;
  c.simulation.burn_in = 1e3;
  c.search.lambda_min = 0.5;
  c.search.lambda_max = 6.0;
  c.search.tau_min = 0.0;
  c.search.tau_max = 4.0;
  c.search.objective = Objective::average;
  return c;
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
  const std::string body = trim(text);
  Reader r(!body.empty() && body.front() == '{' ? parse_json(body, origin) : parse_ini(text, origin), origin);
  RunConfig c = default_config();
  double mu = c.process.mu(), sigma2 = c.process.sigma2();

  r.section("process", {{"mu", [&](const Entry& e) { mu = to_double(e); }},
                        {"sigma2", [&](const Entry& e) { sigma2 = to_double(e); }}});
  r.section("policy", {{"lambda", [&](const Entry& e) { c.policy.lambda = to_double(e); }},
                       {"tau", [&](const Entry& e) { c.policy.tau = to_double(e); }},
                       {"M", [&](const Entry& e) { c.policy.M = to_double(e); }},
                       {"start", [&](const Entry& e) { c.start = to_double(e); }}});
  r.section("cost", {{"k1", [&](const Entry& e) { c.cost.k1 = to_double(e); }},
                     {"k2", [&](const Entry& e) { c.cost.k2 = to_double(e); }},
                     {"r", [&](const Entry& e) { c.cost.r = to_double(e); }},
                     {"alpha", [&](const Entry& e) { c.cost.alpha = to_double(e); }},
                     {"g", [&](const Entry& e) { c.cost.g = to_penalty(e); }},
                     {"g_star", [&](const Entry& e) { c.cost.g_star = to_penalty(e); }}});
  r.section("quadrature",
            {{"rel_tol", [&](const Entry& e) { c.quadrature.rel_tol = to_double(e); }},
             {"abs_tol", [&](const Entry& e) { c.quadrature.abs_tol = to_double(e); }},
             {"tail_mass_tol", [&](const Entry& e) { c.quadrature.tail_mass_tol = to_double(e); }},
             {"max_subdivisions", [&](const Entry& e) { c.quadrature.max_subdivisions = static_cast<int>(to_int(e)); }}});
  SimConfig& s = c.simulation;
  r.section("simulation",
            {{"dt", [&](const Entry& e) { s.dt = to_double(e); }},
             {"refine_factor", [&](const Entry& e) { s.refine_factor = static_cast<int>(to_int(e)); }},
             {"refine_levels", [&](const Entry& e) { s.refine_levels = static_cast<int>(to_int(e)); }},
             {"n_cycles", [&](const Entry& e) { s.n_cycles = to_u64(e); }},
             {"min_total_time", [&](const Entry& e) { s.min_total_time = to_double(e); }},
             {"horizon", [&](const Entry& e) { s.horizon = to_double(e); }},
             {"seed", [&](const Entry& e) { s.seed = to_u64(e); }},
             {"burn_in", [&](const Entry& e) { s.burn_in = to_double(e); }},
             {"occupancy_bins", [&](const Entry& e) { s.occupancy_bins = static_cast<int>(to_int(e)); }},
             {"occupancy_max", [&](const Entry& e) { s.occupancy_max = to_double(e); }},
             {"fill_mode", [&](const Entry& e) {
                if (e.text == "exact")
                  s.fill_mode = FillMode::exact;
                else if (e.text == "time_grid")
                  s.fill_mode = FillMode::time_grid;
                else
                  fail(e.where, "fill_mode must be exact or time_grid");
              }}});
  SearchSpec& q = c.search;
  r.section("search",
            {{"lambda_min", [&](const Entry& e) { q.lambda_min = to_double(e); }},
             {"lambda_max", [&](const Entry& e) { q.lambda_max = to_double(e); }},
             {"tau_min", [&](const Entry& e) { q.tau_min = to_double(e); }},
             {"tau_max", [&](const Entry& e) { q.tau_max = to_double(e); }},
             {"grid", [&](const Entry& e) { q.grid = static_cast<int>(to_int(e)); }},
             {"refine_rounds", [&](const Entry& e) { q.refine_rounds = static_cast<int>(to_int(e)); }},
             {"min_gap", [&](const Entry& e) { q.min_gap = to_double(e); }},
             {"start", [&](const Entry& e) { q.start = to_double(e); }},
             {"objective", [&](const Entry& e) {
                if (e.text == "average")
                  q.objective = Objective::average;
                else if (e.text == "discounted")
                  q.objective = Objective::discounted;
                else
                  fail(e.where, "objective must be average or discounted");
              }}});
  r.section("stationary", {{"points", [&](const Entry& e) { c.stationary.points = static_cast<int>(to_int(e)); }},
                           {"z_max", [&](const Entry& e) { c.stationary.z_max = to_double(e); }},
                           {"simulate", [&](const Entry& e) { c.stationary.simulate = to_bool(e); }}});
  r.section("output", {{"dir", [&](const Entry& e) { c.output_dir = e.text; }}});
  r.finish();

  check([&] { c.process = IGParams(mu, sigma2); }, r.at({"mu", "sigma2"}, "process"), "process");
  check([&] { c.policy.validate(); }, r.at({"tau", "lambda", "M"}, "policy"), "policy");
  if (c.start && *c.start < 0.0) fail(r.at({"start"}, "policy"), "policy: start level must be >= 0");
  check([&] { c.cost.validate(); }, r.at({"alpha", "k1", "k2", "r", "g", "g_star"}, "cost"), "cost");
  check([&] { c.quadrature.validate(); }, r.at({"rel_tol", "abs_tol", "tail_mass_tol", "max_subdivisions"}, "quadrature"),
        "quadrature");
  check([&] { c.simulation.validate(); }, r.at({"dt", "n_cycles", "horizon", "burn_in"}, "simulation"), "simulation");
  q.M = c.policy.M;
  check([&] { c.search.validate(); }, r.at({"tau_max", "lambda_max", "grid"}, "search"), "search");
  if (c.stationary.points < 2) fail(r.at({"points"}, "stationary"), "stationary: points must be >= 2");
  if (c.stationary.z_max < 0.0) fail(r.at({"z_max"}, "stationary"), "stationary: z_max must be >= 0");
  if (c.output_dir.empty()) fail(r.at({"dir"}, "output"), "output: dir must not be empty");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(path + ": cannot open");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), path);
}

namespace {

std::string penalty_text(const PenaltyFn& g) {
  if (g.is_constant()) return fmt(g.constant_value());
  std::string s = "piecewise";
  for (std::size_t i = 0; i < g.knots().size(); ++i) s += " " + fmt(g.knots()[i]) + ":" + fmt(g.values()[i]);
  return s;
}

}  // namespace

std::string render_config(const RunConfig& c) {
  std::ostringstream o;
  o << "[process]\nmu = " << fmt(c.process.mu()) << "\nsigma2 = " << fmt(c.process.sigma2()) << "\n\n";
  o << "[policy]\nlambda = " << fmt(c.policy.lambda) << "\ntau = " << fmt(c.policy.tau) << "\nM = " << fmt(c.policy.M)
    << "\n";
  if (c.start) o << "start = " << fmt(*c.start) << "\n";
  o << "\n[cost]\nk1 = " << fmt(c.cost.k1) << "\nk2 = " << fmt(c.cost.k2) << "\nr = " << fmt(c.cost.r)
    << "\nalpha = " << fmt(c.cost.alpha) << "\ng = " << penalty_text(c.cost.g)
    << "\ng_star = " << penalty_text(c.cost.g_star) << "\n\n";
  o << "[quadrature]\nrel_tol = " << fmt(c.quadrature.rel_tol) << "\nabs_tol = " << fmt(c.quadrature.abs_tol)
    << "\ntail_mass_tol = " << fmt(c.quadrature.tail_mass_tol)
    << "\nmax_subdivisions = " << c.quadrature.max_subdivisions << "\n\n";
  const SimConfig& s = c.simulation;
  o << "[simulation]\ndt = " << fmt(s.dt) << "\nrefine_factor = " << s.refine_factor
    << "\nrefine_levels = " << s.refine_levels << "\nn_cycles = " << s.n_cycles
    << "\nmin_total_time = " << fmt(s.min_total_time) << "\nhorizon = " << fmt(s.horizon) << "\nseed = " << s.seed
    << "\nburn_in = " << fmt(s.burn_in) << "\noccupancy_bins = " << s.occupancy_bins
    << "\noccupancy_max = " << fmt(s.occupancy_max)
    << "\nfill_mode = " << (s.fill_mode == FillMode::exact ? "exact" : "time_grid") << "\n\n";
  const SearchSpec& q = c.search;
  o << "[search]\nlambda_min = " << fmt(q.lambda_min) << "\nlambda_max = " << fmt(q.lambda_max)
    << "\ntau_min = " << fmt(q.tau_min) << "\ntau_max = " << fmt(q.tau_max) << "\ngrid = " << q.grid
    << "\nrefine_rounds = " << q.refine_rounds << "\nmin_gap = " << fmt(q.min_gap)
    << "\nobjective = " << (q.objective == Objective::average ? "average" : "discounted") << "\n";
  if (q.start) o << "start = " << fmt(*q.start) << "\n";
  o << "\n[stationary]\npoints = " << c.stationary.points << "\nz_max = " << fmt(c.stationary.z_max)
    << "\nsimulate = " << (c.stationary.simulate ? "true" : "false") << "\n\n";
  o << "[output]\ndir = " << c.output_dir << "\n";
  return o.str();
}

}  // namespace dam::cli
