#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "relaypde/branch_library.hpp"
#include "relaypde/continuation.hpp"
#include "relaypde/errors.hpp"
#include "relaypde/fixed_point.hpp"
#include "relaypde/grid.hpp"
#include "relaypde/heat.hpp"
#include "relaypde/relay.hpp"

namespace relaypde {

using json = nlohmann::json;

struct BranchSpec {
  std::string type = "constant";
  std::vector<double> params;
  std::vector<std::pair<double, double>> knots;
};

struct ReactionSpec {
  std::string type = "linear";
  double d = 1.0;
  double k = 1.0;  // affine: coefficient of v
  double c = 0.0;  // affine: constant term
  std::vector<std::pair<double, double>> knots;  // table: g(u), f = g(u) + v
};

struct HTermSpec {
  std::string type = "identity";
  double cubic = 1.0;  // cubic: u + cubic u^3
};

struct InitialSpec {
  std::string family = "ramp";
  double amplitude = 1.0;
  double offset = 0.0;
  double depth = 0.0;
  double center = 0.8;
  double width = 0.1;
  std::vector<std::pair<double, double>> knots;
};

struct ScenarioConfig {
  std::string name = "scenario";
  std::size_t n_points = 101;
  double dt = 1e-4;
  double horizon = 0.05;
  double theta = 0.5;
  double alpha = -0.3;
  double beta = 0.3;
  BranchSpec h1, h2;
  std::optional<double> sigma;
  ReactionSpec reaction;
  std::optional<HTermSpec> h_term;
  InitialSpec initial;
  double b_bar = 0.5;
  std::string method = "fixed_point";
  double tol = 1e-9;
  int max_iter = 40;
  double c_w = 0.1;
  int m_max = 1000;
  std::string output_dir = "out";
  std::size_t output_every = 1;
  std::uint64_t seed = 1;
  json experiment;  // null when absent
};

namespace detail {

inline const json* find_path(const json& root, const std::string& path) {
  const json* node = &root;
  std::stringstream ss(path);
  std::string part;
  while (std::getline(ss, part, '.')) {
    if (!node->is_object() || !node->contains(part)) return nullptr;
    node = &(*node)[part];
  }
  return node;
}

inline double get_number(const json& root, const std::string& path, std::optional<double> fallback) {
  const json* node = find_path(root, path);
  if (!node) {
    if (fallback) return *fallback;
    throw ConfigError(path, "required field missing");
  }
  if (!node->is_number()) throw ConfigError(path, "must be a number");
  const double v = node->get<double>();
  if (!std::isfinite(v)) throw ConfigError(path, "must be finite");
  return v;
}

inline std::string get_string(const json& root, const std::string& path, std::optional<std::string> fallback) {
  const json* node = find_path(root, path);
  if (!node) {
    if (fallback) return *fallback;
    throw ConfigError(path, "required field missing");
  }
  if (!node->is_string()) throw ConfigError(path, "must be a string");
  return node->get<std::string>();
}

inline std::vector<double> get_numbers(const json& node, const std::string& path) {
  if (!node.is_array()) throw ConfigError(path, "must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : node) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) throw ConfigError(path, "entries must be finite numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

inline std::vector<std::pair<double, double>> get_knots(const json& node, const std::string& path) {
  if (!node.is_array() || node.size() < 2) throw ConfigError(path, "must be an array of at least two [x, y] pairs");
  std::vector<std::pair<double, double>> out;
  for (const auto& k : node) {
    const auto pair = get_numbers(k, path);
    if (pair.size() != 2) throw ConfigError(path, "each knot must be [x, y]");
    out.emplace_back(pair[0], pair[1]);
  }
  return out;
}

inline BranchSpec parse_branch(const json& root, const std::string& path) {
  const json* node = find_path(root, path);
  if (!node) throw ConfigError(path, "required field missing");
  BranchSpec spec;
  spec.type = get_string(root, path + ".type", std::nullopt);
  if (spec.type == "table") {
    const json* k = find_path(root, path + ".knots");
    if (!k) throw ConfigError(path + ".knots", "required for table branches");
    spec.knots = get_knots(*k, path + ".knots");
    return spec;
  }
  if (const json* p = find_path(root, path + ".params")) spec.params = get_numbers(*p, path + ".params");
  const std::size_t want = spec.type == "constant" ? 1
                           : spec.type == "linear" ? 2
                           : spec.type == "cubic" ? 4
                           : spec.type == "sqrt-singular" ? 2
                                                          : 0;
  if (want == 0) throw ConfigError(path + ".type", "unknown branch type '" + spec.type + "'");
  if (spec.params.size() != want) {
    throw ConfigError(path + ".params", "type '" + spec.type + "' takes " + std::to_string(want) + " parameters");
  }
  return spec;
}

}  // namespace detail

inline ScenarioConfig parse_scenario(const json& j) {
  using namespace detail;
  if (!j.is_object()) throw ConfigError("<root>", "config must be a JSON object");
  ScenarioConfig c;
  c.name = get_string(j, "name", c.name);

  const double n = get_number(j, "grid.N", std::nullopt);
  if (n != std::floor(n) || n < 11) throw ConfigError("grid.N", "must be an integer >= 11");
  c.n_points = static_cast<std::size_t>(n);

  c.dt = get_number(j, "time.dt", std::nullopt);
  if (!(c.dt > 0.0)) throw ConfigError("time.dt", "must be positive");
  c.horizon = get_number(j, "time.horizon", std::nullopt);
  if (!(c.horizon > 0.0)) throw ConfigError("time.horizon", "must be positive");
  c.theta = get_number(j, "time.theta", 0.5);
  if (!(c.theta >= 0.5 && c.theta <= 1.0)) throw ConfigError("time.theta", "must lie in [0.5, 1]");

  c.alpha = get_number(j, "thresholds.alpha", std::nullopt);
  c.beta = get_number(j, "thresholds.beta", std::nullopt);
  if (!(c.alpha < c.beta)) throw ConfigError("thresholds.beta", "must be strictly greater than thresholds.alpha");

  c.h1 = parse_branch(j, "branches.h1");
  c.h2 = parse_branch(j, "branches.h2");
  if (find_path(j, "branches.sigma")) {
    c.sigma = get_number(j, "branches.sigma", std::nullopt);
    if (!(*c.sigma > 0.0 && *c.sigma <= 1.0)) throw ConfigError("branches.sigma", "must lie in (0, 1]");
  }

  c.reaction.type = get_string(j, "reaction.type", std::string("linear"));
  if (c.reaction.type == "linear") {
    c.reaction.d = get_number(j, "reaction.d", 1.0);
  } else if (c.reaction.type == "affine") {
    c.reaction.d = get_number(j, "reaction.d", 1.0);
    c.reaction.k = get_number(j, "reaction.k", 1.0);
    c.reaction.c = get_number(j, "reaction.c", 0.0);
  } else if (c.reaction.type == "table") {
    const json* k = find_path(j, "reaction.knots");
    if (!k) throw ConfigError("reaction.knots", "required for table reactions");
    c.reaction.knots = get_knots(*k, "reaction.knots");
  } else {
    throw ConfigError("reaction.type", "unknown reaction type '" + c.reaction.type + "'");
  }

  if (find_path(j, "h_term")) {
    HTermSpec h;
    h.type = get_string(j, "h_term.type", std::nullopt);
    if (h.type == "cubic") h.cubic = get_number(j, "h_term.coefficient", 1.0);
    if (h.type == "negated") throw ConfigError("h_term.type", "h(u) = -u violates u h(u) > 0");
    if (h.type != "identity" && h.type != "cubic") throw ConfigError("h_term.type", "unknown h term '" + h.type + "'");
    if (h.type == "cubic" && h.cubic < 0.0) throw ConfigError("h_term.coefficient", "must be nonnegative");
    c.h_term = h;
  }

  c.initial.family = get_string(j, "initial.family", std::nullopt);
  if (c.initial.family == "ramp" || c.initial.family == "cosine-dip") {
    c.initial.amplitude = get_number(j, "initial.amplitude", 1.0);
    c.initial.offset = get_number(j, "initial.offset", 0.0);
    if (c.initial.family == "cosine-dip") {
      c.initial.depth = get_number(j, "initial.depth", std::nullopt);
      c.initial.center = get_number(j, "initial.center", std::nullopt);
      c.initial.width = get_number(j, "initial.width", std::nullopt);
      if (!(c.initial.width > 0.0)) throw ConfigError("initial.width", "must be positive");
    }
  } else if (c.initial.family == "custom-knots") {
    const json* k = find_path(j, "initial.knots");
    if (!k) throw ConfigError("initial.knots", "required for custom-knots");
    c.initial.knots = get_knots(*k, "initial.knots");
  } else {
    throw ConfigError("initial.family", "unknown family '" + c.initial.family + "'");
  }

  c.b_bar = get_number(j, "b_bar", std::nullopt);
  if (!(c.b_bar > 0.0 && c.b_bar < 1.0)) throw ConfigError("b_bar", "must lie strictly between 0 and 1");

  c.method = get_string(j, "solver.method", c.method);
  if (c.method != "fixed_point" && c.method != "direct" && c.method != "both") {
    throw ConfigError("solver.method", "must be fixed_point, direct or both");
  }
  c.tol = get_number(j, "solver.tol", c.tol);
  if (!(c.tol > 0.0)) throw ConfigError("solver.tol", "must be positive");
  const double mi = get_number(j, "solver.max_iter", c.max_iter);
  if (mi < 1 || mi != std::floor(mi)) throw ConfigError("solver.max_iter", "must be a positive integer");
  c.max_iter = static_cast<int>(mi);
  c.c_w = get_number(j, "solver.c_w", c.c_w);
  if (!(c.c_w > 0.0)) throw ConfigError("solver.c_w", "must be positive");
  const double mm = get_number(j, "solver.m_max", c.m_max);
  if (mm < 1 || mm != std::floor(mm)) throw ConfigError("solver.m_max", "must be a positive integer");
  c.m_max = static_cast<int>(mm);

  c.output_dir = get_string(j, "output.dir", c.output_dir);
  const double every = get_number(j, "output.every", 1.0);
  if (every < 1 || every != std::floor(every)) throw ConfigError("output.every", "must be a positive integer");
  c.output_every = static_cast<std::size_t>(every);
  const double seed = get_number(j, "seed", 1.0);
  if (seed < 0 || seed != std::floor(seed)) throw ConfigError("seed", "must be a nonnegative integer");
  c.seed = static_cast<std::uint64_t>(seed);

  if (const json* e = find_path(j, "experiment")) {
    if (!e->is_object() || !e->contains("type")) throw ConfigError("experiment.type", "required when experiment is given");
    c.experiment = *e;
  }
  return c;
}

inline ScenarioConfig load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("<file>", "cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("<file>", std::string("parse error: ") + e.what());
  }
  return parse_scenario(j);
}

inline BranchFn build_branch(const BranchSpec& spec, double threshold) {
  const auto& p = spec.params;
  if (spec.type == "constant") return branches::constant(p[0]);
  if (spec.type == "linear") return branches::linear(p[0], p[1]);
  if (spec.type == "cubic") return branches::cubic(p[0], p[1], p[2], p[3]);
  if (spec.type == "sqrt-singular") return branches::sqrt_singular(threshold, p[0], p[1]);
  if (spec.type == "table") return branches::table(spec.knots);
  throw ConfigError("branches", "unknown branch type '" + spec.type + "'");
}

inline RelayBranches build_branches(const ScenarioConfig& c) {
  Thresholds thr(c.alpha, c.beta);
  return RelayBranches{thr, build_branch(c.h1, c.beta), build_branch(c.h2, c.alpha), c.sigma};
}

inline ReactionTerm build_reaction(const ReactionSpec& r) {
  if (r.type == "linear") return make_linear_reaction(r.d);
  if (r.type == "affine") {
    const double d = r.d, k = r.k, c0 = r.c;
    return ReactionTerm{[=](double u, double v) { return -d * u + k * v + c0; },
                        [=](double, double) { return -d; }, std::abs(d) + std::abs(k)};
  }
  BranchFn g = branches::table(r.knots);
  return ReactionTerm{[g](double u, double v) { return g(u) + v; }, {}, std::nullopt};
}

inline std::pair<std::function<double(double)>, std::function<double(double)>> build_h_term(const HTermSpec& h) {
  if (h.type == "cubic") {
    const double c = h.cubic;
    return {[c](double u) { return u + c * u * u * u; }, [c](double u) { return 1.0 + 3.0 * c * u * u; }};
  }
  return {[](double u) { return u; }, [](double) { return 1.0; }};
}

inline Problem build_problem(const ScenarioConfig& c) { return Problem{build_branches(c), build_reaction(c.reaction)}; }

/// Initial profile on the grid, endpoints projected to zero slope when needed.
inline GridFunction build_initial(const ScenarioConfig& c, const Grid& grid) {
  const auto& s = c.initial;
  constexpr double pi = 3.14159265358979323846;
  GridFunction phi(grid);
  if (s.family == "custom-knots") {
    const BranchFn f = branches::table(s.knots);
    phi = GridFunction::sample(grid, f);
  } else {
    const double base = c.alpha + s.offset;
    const double cb = std::cos(pi * c.b_bar);
    phi = GridFunction::sample(grid, [&](double x) {
      double y = base + s.amplitude * (cb - std::cos(pi * x));
      if (s.family == "cosine-dip") {
        const double r = (x - s.center) / s.width;
        if (std::abs(r) < 1.0) y -= s.depth * std::pow(1.0 - r * r, 3);
      }
      return y;
    });
  }
  project_neumann(phi, 10.0 * grid.spacing());
  return phi;
}

inline ContinuationOptions continuation_options(const ScenarioConfig& c, double box_U) {
  ContinuationOptions o;
  o.dt = c.dt;
  o.theta = c.theta;
  o.horizon = c.horizon;
  o.c_w = c.c_w;
  o.m_max = c.m_max;
  o.tol = c.tol;
  o.max_iter = c.max_iter;
  o.box_U = box_U;
  return o;
}

}  // namespace relaypde
