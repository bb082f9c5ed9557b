#pragma once

#include <fstream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "lipflow/boundary.hpp"
#include "lipflow/error.hpp"
#include "lipflow/geometry.hpp"
#include "lipflow/integrand.hpp"
#include "lipflow/mesh.hpp"
#include "lipflow/solver.hpp"

namespace lipflow {

// Flat key-value run configuration with dotted namespaces
// (domain.*, integrand.*, datum.*, mesh.*, solver.*, barrier.*, checks.*).
// Lines are `key = value`; `#` starts a comment line.
struct Config {
  std::map<std::string, std::string> kv;

  static Config parse(std::istream& in) {
    Config cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      auto trim = [](std::string s) {
        size_t a = s.find_first_not_of(" \t\r");
        size_t b = s.find_last_not_of(" \t\r");
        return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
      };
      std::string t = trim(line);
      if (t.empty() || t[0] == '#') continue;
      size_t eq = t.find('=');
      if (eq == std::string::npos)
        throw ConfigError("config line " + std::to_string(lineno) + ": expected key = value");
      std::string key = trim(t.substr(0, eq));
      std::string value = trim(t.substr(eq + 1));
      if (key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": empty key");
      cfg.kv[key] = value;
    }
    return cfg;
  }

  static Config parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    return parse(in);
  }

  bool has(const std::string& key) const { return kv.count(key) != 0; }

  std::string str(const std::string& key, const std::string& fallback = "") const {
    auto it = kv.find(key);
    return it == kv.end() ? fallback : it->second;
  }

  std::string require(const std::string& key) const {
    auto it = kv.find(key);
    if (it == kv.end()) throw ConfigError("missing required config key: " + key);
    return it->second;
  }

  double num(const std::string& key, double fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    return parse_double(key, it->second);
  }

  double require_num(const std::string& key) const { return parse_double(key, require(key)); }

  int integer(const std::string& key, int fallback) const {
    return int(std::llround(num(key, fallback)));
  }

  bool flag(const std::string& key, bool fallback) const {
    auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    throw ConfigError("config key " + key + ": expected a boolean, got '" + v + "'");
  }

  std::vector<double> num_list(const std::string& key) const {
    std::vector<double> out;
    auto it = kv.find(key);
    if (it == kv.end()) return out;
    std::stringstream ss(it->second);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
      if (tok.find_first_not_of(" \t") == std::string::npos) continue;
      out.push_back(parse_double(key, tok));
    }
    return out;
  }

 private:
  static double parse_double(const std::string& key, const std::string& v) {
    try {
      size_t pos = 0;
      double x = std::stod(v, &pos);
      while (pos < v.size() && (v[pos] == ' ' || v[pos] == '\t')) ++pos;
      if (pos != v.size()) throw std::invalid_argument(v);
      return x;
    } catch (...) {
      throw ConfigError("config key " + key + ": expected a number, got '" + v + "'");
    }
  }
};

// Everything a run needs, with stable addresses so SolverConfig can point
// into it. Create through build_scenario only.
struct Scenario {
  Config config;
  ConvexDomain domain;
  ConvexIntegrand integrand;
  BoundaryDatum data;
  Mesh mesh;
  SolverConfig solver;
  double barrier_alpha = 0.0;
  Vec2 x_o;
  std::vector<double> trace_times;

  Scenario() = default;
  Scenario(const Scenario&) = delete;
  Scenario& operator=(const Scenario&) = delete;
};

inline std::unique_ptr<Scenario> build_scenario(const Config& cfg, unsigned seed = 0) {
  auto s = std::make_unique<Scenario>();
  s->config = cfg;

  std::string dname = cfg.require("domain.name");
  if (dname == "disk") {
    Vec2 center{cfg.num("domain.center_x", 0.0), cfg.num("domain.center_y", 0.0)};
    s->domain = disk_domain(center, cfg.num("domain.radius", 1.0), cfg.num("domain.R", 0.0));
  } else if (dname == "ellipse") {
    s->domain = ellipse_domain(cfg.require_num("domain.a"), cfg.require_num("domain.b"),
                               cfg.num("domain.R", 0.0));
  } else if (dname == "square") {
    s->domain = square_domain(cfg.num("domain.side", 2.0));
  } else {
    throw ConfigError("unknown domain.name: " + dname);
  }

  std::string iname = cfg.require("integrand.name");
  if (iname == "quadratic") s->integrand = quadratic_integrand();
  else if (iname == "quartic") s->integrand = quartic_integrand();
  else if (iname == "ring") s->integrand = ring_integrand();
  else throw ConfigError("unknown integrand.name: " + iname);

  double T = cfg.num("datum.T", M_PI);
  std::string gname = cfg.require("datum.name");
  if (gname == "rotating") {
    s->data = rotating_datum(s->domain, cfg.num("datum.amp", 1.0), cfg.num("datum.omega", 1.0), T);
  } else if (gname == "constant") {
    s->data = constant_datum(s->domain, cfg.num("datum.value", 0.0), T);
  } else if (gname == "fourier") {
    std::vector<HarmonicTerm> terms;
    for (int j = 1; cfg.has("datum.term" + std::to_string(j)); ++j) {
      // k imag m phase amp
      auto vals = [&] {
        std::stringstream ss(cfg.str("datum.term" + std::to_string(j)));
        std::vector<double> v;
        double x;
        while (ss >> x) v.push_back(x);
        return v;
      }();
      if (vals.size() != 5)
        throw ConfigError("datum.term" + std::to_string(j) + ": expected 'k imag m phase amp'");
      terms.push_back({int(vals[0]), vals[1] != 0.0, vals[2], vals[3], vals[4]});
    }
    if (terms.empty()) throw ConfigError("datum.name = fourier needs datum.term1 ...");
    s->data = fourier_datum(s->domain, terms, T);
  } else if (gname == "cusp") {
    Vec2 p{cfg.require_num("datum.px"), cfg.require_num("datum.py")};
    s->data = cusp_datum(s->domain, p, cfg.num("datum.amp", 1.0), T);
  } else if (gname == "radial_quadratic") {
    Vec2 p{cfg.num("datum.px", 0.0), cfg.num("datum.py", 0.0)};
    s->data = radial_quadratic_datum(s->domain, p, cfg.num("datum.amp", 1.0),
                                     cfg.num("datum.offset", 0.0), T);
  } else {
    throw ConfigError("unknown datum.name: " + gname);
  }

  if (cfg.num("mesh.target_edge", 0.0) > 0.0)
    s->mesh = mesh_domain(s->domain, cfg.require_num("mesh.target_edge"), seed);

  s->solver.h = cfg.num("solver.h", T / 16.0);
  s->solver.L = cfg.num("solver.L", 4.0);
  s->solver.mesh = &s->mesh;
  s->solver.integrand = &s->integrand;
  s->solver.data = &s->data;
  s->solver.inner_tol = cfg.num("solver.inner_tol", 1e-10);
  s->solver.inner_max_iter = cfg.integer("solver.inner_max_iter", 50000);
  std::string mode = cfg.str("solver.constraint_mode", "projection");
  if (mode == "projection") s->solver.constraint_mode = SolverConfig::ConstraintMode::projection;
  else if (mode == "penalty") s->solver.constraint_mode = SolverConfig::ConstraintMode::penalty;
  else throw ConfigError("unknown solver.constraint_mode: " + mode);

  s->barrier_alpha = cfg.num("barrier.alpha", 2.0);
  double theta = cfg.num("barrier.x_o_theta", M_PI);
  s->x_o = s->domain.boundary(theta);
  s->trace_times = cfg.num_list("barrier.trace_times");
  return s;
}

}  // namespace lipflow
