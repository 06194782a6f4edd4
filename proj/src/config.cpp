#include "terracelab/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "terracelab/errors.hpp"

namespace terracelab {

namespace {

std::vector<std::string> split_path(std::string_view key) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : key) {
    if (ch == '.') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  for (const auto& p : parts)
    if (p.empty()) throw ConfigError("malformed key '" + std::string(key) + "'");
  return parts;
}

void apply_override(toml::table& root, const std::string& entry) {
  const auto eq = entry.find('=');
  if (eq == std::string::npos) throw ConfigError("override '" + entry + "' is not key=value");
  const std::string key = entry.substr(0, eq);
  const std::string value = entry.substr(eq + 1);
  toml::table parsed;
  try {
    parsed = toml::parse("v = " + value);
  } catch (const toml::parse_error& e) {
    // Bare words are taken as strings (e.g. grid.scheme=imex).
    try {
      parsed = toml::parse("v = \"" + value + "\"");
    } catch (const toml::parse_error&) {
      throw ConfigError("override value for '" + key + "' is not valid: " + std::string(e.description()));
    }
  }
  const auto parts = split_path(key);
  toml::table* t = &root;
  for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
    toml::node* n = t->get(parts[i]);
    if (!n) {
      t->insert(parts[i], toml::table{});
      n = t->get(parts[i]);
    }
    t = n->as_table();
    if (!t) throw ConfigError("override path '" + key + "' crosses a non-table value");
  }
  t->insert_or_assign(parts.back(), *parsed.get("v"));
}

// Typed access that records which keys were consumed.
class Reader {
 public:
  explicit Reader(const toml::table& root) : root_(root) {}

  const toml::node* find(const std::string& path) {
    used_.insert(path);
    const toml::table* t = &root_;
    const auto parts = split_path(path);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
      const toml::node* n = t->get(parts[i]);
      if (!n) return nullptr;
      t = n->as_table();
      if (!t) throw ConfigError("'" + parts[i] + "' must be a table");
    }
    return t->get(parts.back());
  }

  static double to_double(const toml::node& n, const std::string& path) {
    if (auto i = n.as_integer()) return static_cast<double>(i->get());
    if (auto f = n.as_floating_point()) return f->get();
    throw ConfigError("'" + path + "' must be a number");
  }

  void num(const std::string& path, double& out) {
    if (const auto* n = find(path)) out = to_double(*n, path);
  }
  void integer(const std::string& path, int& out) {
    if (const auto* n = find(path)) {
      const auto* i = n->as_integer();
      if (!i) throw ConfigError("'" + path + "' must be an integer");
      out = static_cast<int>(i->get());
    }
  }
  void str(const std::string& path, std::string& out) {
    if (const auto* n = find(path)) {
      const auto* s = n->as_string();
      if (!s) throw ConfigError("'" + path + "' must be a string");
      out = s->get();
    }
  }
  bool flag(const std::string& path, bool& out) {
    if (const auto* n = find(path)) {
      const auto* b = n->as_boolean();
      if (!b) throw ConfigError("'" + path + "' must be a boolean");
      out = b->get();
      return true;
    }
    return false;
  }
  bool list(const std::string& path, std::vector<double>& out) {
    const auto* n = find(path);
    if (!n) return false;
    const auto* a = n->as_array();
    if (!a) throw ConfigError("'" + path + "' must be an array");
    out.clear();
    for (const auto& e : *a) out.push_back(to_double(e, path));
    return true;
  }
  bool pairs(const std::string& path, std::vector<std::pair<double, double>>& out) {
    const auto* n = find(path);
    if (!n) return false;
    const auto* a = n->as_array();
    if (!a) throw ConfigError("'" + path + "' must be an array of [u, f] pairs");
    out.clear();
    for (const auto& e : *a) {
      const auto* p = e.as_array();
      if (!p || p->size() != 2) throw ConfigError("'" + path + "' entries must be [u, f] pairs");
      out.emplace_back(to_double(*p->get(0), path), to_double(*p->get(1), path));
    }
    return true;
  }

  void reject_unknown() const { walk(root_, ""); }

 private:
  void walk(const toml::table& t, const std::string& prefix) const {
    for (const auto& [k, v] : t) {
      const std::string path = prefix.empty() ? std::string(k.str()) : prefix + "." + std::string(k.str());
      if (used_.count(path)) continue;
      if (const auto* sub = v.as_table()) walk(*sub, path);
      else throw ConfigError("unknown configuration key '" + path + "'");
    }
  }

  const toml::table& root_;
  std::set<std::string> used_;
};

Scheme parse_scheme(const std::string& s) {
  if (s == "rk4") return Scheme::RK4;
  if (s == "imex") return Scheme::IMEXTrapezoid;
  throw ConfigError("grid.scheme must be \"rk4\" or \"imex\"");
}

}  // namespace

RunConfig parse_config(std::string_view text, const std::vector<std::string>& overrides) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << "parse error: " << e.description() << " at line " << e.source().begin.line;
    throw ConfigError(os.str());
  }
  for (const auto& o : overrides) apply_override(root, o);

  RunConfig c;
  Reader r(root);

  std::string kind = "poly";
  r.str("nonlinearity.kind", kind);
  std::vector<double> coeffs;
  std::vector<std::pair<double, double>> points;
  const bool has_coeffs = r.list("nonlinearity.coeffs", coeffs);
  const bool has_points = r.pairs("nonlinearity.points", points);
  try {
    if (kind == "poly") {
      if (!has_coeffs || coeffs.empty()) throw ConfigError("nonlinearity.coeffs is required for kind = \"poly\"");
      c.term = ReactionTerm::polynomial(coeffs);
    } else if (kind == "nodes") {
      if (!has_points) throw ConfigError("nonlinearity.points is required for kind = \"nodes\"");
      c.term = ReactionTerm::nodes(points);
    } else {
      throw ConfigError("nonlinearity.kind must be \"poly\" or \"nodes\"");
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(std::string("nonlinearity: ") + e.what());
  }
  std::vector<double> search;
  if (r.list("nonlinearity.search", search)) {
    if (search.size() != 2 || !(search[0] < search[1])) throw ConfigError("nonlinearity.search must be [lo, hi] with lo < hi");
    c.search = {search[0], search[1]};
  }
  r.integer("nonlinearity.scan_points", c.zero.scan_points);
  r.num("nonlinearity.tol_zero", c.zero.tol_zero);
  r.num("nonlinearity.tol_nondegen", c.zero.tol_nondegen);

  r.integer("grid.N", c.grid.N);
  r.num("grid.R_max", c.grid.R_max);
  r.num("grid.dr", c.grid.dr);
  r.num("grid.dt", c.grid.dt);
  r.num("grid.cfl", c.grid.cfl);
  std::string scheme = "rk4";
  r.str("grid.scheme", scheme);
  c.grid.scheme = parse_scheme(scheme);
  r.num("grid.T_final", c.T_final);
  r.num("grid.stride", c.stride);

  r.str("initial.kind", c.initial_kind);
  if (c.initial_kind != "terrace-seed" && c.initial_kind != "bump")
    throw ConfigError("initial.kind must be \"terrace-seed\" or \"bump\"");
  r.num("initial.epsilon", c.epsilon);
  r.num("initial.theta", c.theta);
  r.num("initial.R", c.bump_R);

  r.num("front.delta_launch_rel", c.front.delta_launch_rel);
  r.num("front.tol_tail", c.front.tol_tail);
  r.num("front.rtol", c.front.rtol);
  r.num("front.bracket_tol", c.front.bracket_tol);
  r.num("front.sample_spacing", c.front.sample_spacing);
  r.integer("front.prescan", c.front.prescan);
  r.num("front.bottom_tol_rel", c.front.bottom_tol_rel);
  r.num("terrace.tol_speed", c.tol_speed);

  r.list("levels.values", c.levels);
  r.num("levels.tail_fraction", c.tail_fraction);
  r.num("levels.min_floor_distance", c.track.min_floor_distance);
  r.num("levels.slope_min", c.slope_min);
  r.num("levels.gap_bound", c.gap_bound);

  r.num("supersub.epsilon_nbhd", c.constants.epsilon_nbhd);
  r.num("supersub.t_min", c.constants.t_min);
  r.num("supersub.t0", c.radial_check.t0);
  r.num("supersub.radial_tol", c.radial_check.tol);
  r.num("supersub.wave_r_lo", c.wave_check.r_lo);
  r.num("supersub.wave_r_hi", c.wave_check.r_hi);
  r.num("supersub.wave_t_hi", c.wave_check.t_hi);
  r.num("supersub.wave_h", c.wave_check.h);
  r.num("supersub.wave_k", c.wave_check.k);
  r.num("supersub.sandwich_tol", c.sandwich.tol);
  r.num("supersub.search_bound", c.sandwich.search_bound);
  r.num("supersub.sandwich_theta", c.sandwich_theta);
  r.num("supersub.sandwich_R_offset", c.sandwich_R_offset);
  r.num("supersub.T_classify", c.T_classify);

  r.integer("planar2d.n", c.grid2d.n);
  r.num("planar2d.L", c.grid2d.L);
  r.num("planar2d.dt", c.grid2d.dt);
  r.num("planar2d.cfl", c.grid2d.cfl);
  r.num("planar2d.T_final", c.T2d);
  r.num("planar2d.stride", c.stride2d);
  r.num("planar2d.theta", c.theta2d);
  r.num("planar2d.a", c.ellipse_a);
  r.num("planar2d.b", c.ellipse_b);
  r.num("planar2d.angle", c.ellipse_angle);
  r.num("planar2d.level", c.level2d);
  r.num("planar2d.ring_from", c.ring_from);
  r.integer("planar2d.directions", c.ring.n_directions);
  r.num("planar2d.slice_half_width", c.ring.slice_half_width);
  r.num("planar2d.V_R_max", c.V_R_max);

  r.str("output.format", c.format);
  if (c.format != "csv" && c.format != "binary") throw ConfigError("output.format must be \"csv\" or \"binary\"");
  r.integer("workers", c.workers);
  if (c.workers < 1) throw ConfigError("workers must be >= 1");

  r.reject_unknown();

  // Structural checks that need no numerics.
  try {
    c.grid.validate();
    c.grid2d.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  if (!(c.T_final > 0.0 && c.stride > 0.0)) throw ConfigError("grid.T_final and grid.stride must be positive");
  if (!(c.tail_fraction > 0.0 && c.tail_fraction <= 1.0)) throw ConfigError("levels.tail_fraction must lie in (0, 1]");
  if (!(c.stride2d > 0.0 && c.T2d > 0.0)) throw ConfigError("planar2d.T_final and planar2d.stride must be positive");
  return c;
}

RunConfig load_config(const std::string& path, const std::vector<std::string>& overrides) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), overrides);
}

}  // namespace terracelab
