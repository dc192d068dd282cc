#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "relaypde/continuation.hpp"
#include "relaypde/direct_march.hpp"
#include "relaypde/dissipation.hpp"
#include "relaypde/io.hpp"
#include "relaypde/norms.hpp"
#include "relaypde/scenario.hpp"

namespace relaypde {

/// Runs fn(0..count-1) on up to `threads` workers; results keep index order.
template <typename T>
std::vector<T> parallel_map(std::size_t count, unsigned threads, const std::function<T(std::size_t)>& fn) {
  std::vector<std::optional<T>> slots(count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(count)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  std::vector<T> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

/// Strict box for the scenario's reaction, or the generalized one when an h
/// term and mu > 0 are given. Infinite when no box exists.
inline double scenario_box(const ScenarioConfig& c, const Problem& p, const GridFunction& phi, double mu = 0.0) {
  const double hint = std::max(sup_norm(phi), std::max(std::abs(c.alpha), std::abs(c.beta)));
  try {
    if (mu > 0.0 && c.h_term) {
      return invariant_rectangle_bound_generalized(p.reaction, p.branches, build_h_term(*c.h_term).first, mu, hint).U;
    }
    return invariant_rectangle_bound(p.reaction, p.branches, hint).U;
  } catch (const NoBoxFound&) {
    return std::numeric_limits<double>::infinity();
  }
}

inline std::size_t horizon_steps(const ScenarioConfig& c) {
  return static_cast<std::size_t>(std::llround(c.horizon / c.dt));
}

inline SolveResult solve_with(const ScenarioConfig& c, const Problem& p, const GridFunction& phi, double b_bar,
                              SolverMethod method, double box_U) {
  if (method == SolverMethod::fixed_point) return continuation(phi, b_bar, p, continuation_options(c, box_U));
  return direct_march(WindowStart::single_interface(phi, b_bar), p, horizon_steps(c),
                      DirectOptions{c.dt, c.theta, box_U});
}

/// Sup over common time levels of the pointwise difference.
inline double field_sup_gap(const SolveResult& a, const SolveResult& b) {
  const std::size_t n = std::min(a.u.time_count(), b.u.time_count());
  double g = 0.0;
  for (std::size_t k = 0; k < n; ++k) g = std::max(g, sup_distance(a.u.levels[k], b.u.levels[k]));
  return g;
}

inline double boundary_gap(const SolveResult& a, const SolveResult& b) {
  const std::size_t n = std::min(a.boundary.b_values.size(), b.boundary.b_values.size());
  double g = 0.0;
  for (std::size_t k = 0; k < n; ++k) g = std::max(g, std::abs(a.boundary.b_values[k] - b.boundary.b_values[k]));
  return g;
}

inline SpaceTimeField field_difference(const SolveResult& a, const SolveResult& b) {
  const std::size_t n = std::min(a.u.time_count(), b.u.time_count());
  SpaceTimeField d(a.grid);
  for (std::size_t k = 0; k < n; ++k) {
    std::vector<double> row(a.grid.size());
    for (std::size_t i = 0; i < row.size(); ++i) row[i] = a.u.levels[k][i] - b.u.levels[k][i];
    d.push(std::move(row));
  }
  return d;
}

/// L_q(Q_T) norm with trapezoid weights in both axes.
inline double space_time_lq(const SpaceTimeField& f, double dt, double q) {
  double total = 0.0;
  const std::size_t k_count = f.time_count();
  for (std::size_t k = 0; k < k_count; ++k) {
    const double wk = (k == 0 || k + 1 == k_count) ? 0.5 * dt : dt;
    total += wk * detail::lq_power(f.levels[k], f.grid.spacing(), q);
  }
  return std::pow(total, 1.0 / q);
}

struct TableRow {
  double parameter = 0.0;
  std::vector<double> values;
  std::string verdict;
  std::string note;
  bool excluded = false;
};

struct ExperimentTable {
  std::string name;
  std::string parameter_name;
  std::vector<std::string> columns;
  std::vector<TableRow> rows;
  Summary checks;

  bool all_checks_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.second == "pass"; });
  }
};

inline void write_table(const std::filesystem::path& path, const ExperimentTable& t) {
  auto out = open_output(path);
  out << t.parameter_name;
  for (const auto& c : t.columns) out << ',' << c;
  out << ",termination,note\n";
  for (const auto& r : t.rows) {
    out << fmt_num(r.parameter);
    for (double v : r.values) out << ',' << fmt_num(v);
    out << ',' << r.verdict << ',' << (r.excluded ? "excluded " : "") << r.note << '\n';
  }
}

/// True when column `col` strictly decreases over the rows that are not excluded.
inline bool strictly_decreasing(const ExperimentTable& t, std::size_t col, std::size_t skip_rows = 0) {
  std::optional<double> prev;
  for (std::size_t r = skip_rows; r < t.rows.size(); ++r) {
    if (t.rows[r].excluded) continue;
    const double v = t.rows[r].values[col];
    if (prev && !(v < *prev)) return false;
    prev = v;
  }
  return true;
}

inline const char* verdict(bool ok) { return ok ? "pass" : "fail"; }

/// Smooth bump (1 - r^2)^4 on |x - center| < width, scaled to unit trace norm.
inline GridFunction unit_bump(const Grid& grid, double center, double width, const NormParams& params = {}) {
  GridFunction bump = GridFunction::sample(grid, [&](double x) {
    const double r = (x - center) / width;
    return std::abs(r) < 1.0 ? std::pow(1.0 - r * r, 4) : 0.0;
  });
  const double norm = trace_norm(bump, params);
  for (double& x : bump.values) x /= norm;
  return bump;
}

/// Bump support in the configuration-2 part, clear of the interface band.
inline std::pair<double, double> bump_support(double b_bar) {
  const double width = std::min(0.15, 0.3 * (1.0 - b_bar));
  const double center = std::min(b_bar + 0.6 * (1.0 - b_bar), 1.0 - width);
  return {center, width};
}

inline GridFunction perturbed(const GridFunction& phi, const GridFunction& unit, double delta) {
  GridFunction out = phi;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += delta * unit[i];
  return out;
}

inline std::vector<double> json_numbers(const json& j, const std::string& key, std::vector<double> fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  return detail::get_numbers(j[key], "experiment." + key);
}

inline double json_number(const json& j, const std::string& key, double fallback) {
  if (!j.is_object() || !j.contains(key)) return fallback;
  if (!j[key].is_number()) throw ConfigError("experiment." + key, "must be a number");
  return j[key].get<double>();
}

inline ExperimentTable experiment_continuous_dependence(const ScenarioConfig& c, const std::vector<double>& deltas,
                                                        double interface_scale, unsigned threads) {
  const Grid grid(c.n_points);
  const Problem p = build_problem(c);
  const GridFunction phi = build_initial(c, grid);
  const double box = scenario_box(c, p, phi);
  const auto [center, width] = bump_support(c.b_bar);
  const GridFunction unit = unit_bump(grid, center, width);
  const Certification base_cert = certify(phi, c.b_bar, p.branches.thresholds, c.m_max, {});

  struct Run {
    SolveResult result;
    bool member;
  };
  const auto runs = parallel_map<Run>(deltas.size() + 1, threads, [&](std::size_t i) {
    if (i == 0) return Run{solve_with(c, p, phi, c.b_bar, SolverMethod::fixed_point, box), true};
    const double delta = deltas[i - 1];
    const GridFunction phi_n = perturbed(phi, unit, delta);
    const double b_n = c.b_bar + interface_scale * delta;
    bool member = false;
    if (base_cert.cert.m && b_n < 1.0) {
      member = em_member(phi_n, derivative(phi_n), b_n, trace_norm(phi_n), p.branches.thresholds,
                         *base_cert.cert.m + 1);
    }
    return Run{solve_with(c, p, phi_n, b_n, SolverMethod::fixed_point, box), member};
  });

  ExperimentTable t;
  t.name = "continuous_dependence";
  t.parameter_name = "delta";
  t.columns = {"gap_wq21", "gap_sup", "gap_b"};
  const SolveResult& base = runs[0].result;
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const SolveResult& r = runs[i + 1].result;
    TableRow row;
    row.parameter = deltas[i];
    const SpaceTimeField diff = field_difference(r, base);
    const double w = diff.time_count() >= 3 ? wq21_norm(diff, c.dt) : 0.0;
    row.values = {w, field_sup_gap(r, base), boundary_gap(r, base)};
    row.verdict = r.termination.describe();
    if (!runs[i + 1].member) {
      row.excluded = true;
      row.note = "lost E_(m+1) membership";
    }
    t.rows.push_back(std::move(row));
  }
  t.checks.emplace_back("base_termination", to_string(base.termination.kind));
  for (std::size_t col = 0; col < t.columns.size(); ++col) {
    t.checks.emplace_back(t.columns[col] + "_decreasing", verdict(strictly_decreasing(t, col)));
  }
  std::optional<std::size_t> first, last;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r].excluded) continue;
    if (!first) first = r;
    last = r;
  }
  bool halved = first && last && *first != *last;
  if (halved) {
    for (std::size_t col = 1; col < 3; ++col) {
      halved = halved && t.rows[*last].values[col] < 0.5 * t.rows[*first].values[col];
    }
  }
  t.checks.emplace_back("smallest_below_half_largest", verdict(halved));
  return t;
}

inline double post_change_gap(const SolveResult& a, const SolveResult& b, double t_from) {
  const std::size_t n = std::min(a.u.time_count(), b.u.time_count());
  double g = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    if (a.times[k] + 1e-12 < t_from) continue;
    g = std::max(g, sup_distance(a.u.levels[k], b.u.levels[k]));
  }
  return g;
}

inline double change_time(const SolveResult& r) {
  return r.termination.kind == TerminationKind::topology_changed ? r.termination.time
                                                                 : std::numeric_limits<double>::infinity();
}

inline ExperimentTable experiment_topology_change(const ScenarioConfig& c, const std::vector<double>& deltas,
                                                  unsigned threads) {
  const Grid grid(c.n_points);
  const Problem p = build_problem(c);
  const GridFunction phi = build_initial(c, grid);
  const double box = scenario_box(c, p, phi);
  const auto [center, width] = bump_support(c.b_bar);
  const GridFunction unit = unit_bump(grid, center, width);

  const auto runs = parallel_map<SolveResult>(deltas.size() + 1, threads, [&](std::size_t i) {
    const double delta = i == 0 ? 0.0 : deltas[i - 1];
    return solve_with(c, p, perturbed(phi, unit, delta), c.b_bar, SolverMethod::fixed_point, box);
  });

  const SolveResult& base = runs[0];
  ExperimentTable t;
  t.name = "topology_change";
  t.parameter_name = "delta";
  t.columns = {"t_change", "gap_sup", "gap_b", "gap_sup_post_change"};
  const double t_base = change_time(base);
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const SolveResult& r = runs[i + 1];
    TableRow row;
    row.parameter = deltas[i];
    const double t_n = change_time(r);
    row.values = {t_n, field_sup_gap(r, base), boundary_gap(r, base), post_change_gap(r, base, std::max(t_base, t_n))};
    row.verdict = r.termination.describe();
    if (r.termination.kind != TerminationKind::topology_changed) {
      row.excluded = true;
      row.note = "no topology change in the perturbed run";
    }
    t.rows.push_back(std::move(row));
  }

  bool frozen = base.termination.kind == TerminationKind::topology_changed;
  for (std::size_t k = 0; k < base.times.size() && frozen; ++k) {
    if (base.times[k] >= t_base && base.boundary.b_values[k] != 1.0) frozen = false;
  }
  const bool continued = base.diagnostics.terminal_single_branch_from >= 0.0 &&
                         std::abs(base.times.back() - c.horizon) < 0.5 * c.dt;
  t.checks.emplace_back("base_topology_changed", verdict(base.termination.kind == TerminationKind::topology_changed));
  t.checks.emplace_back("base_t_change", fmt_num(t_base));
  t.checks.emplace_back("single_branch_continued", verdict(continued));
  t.checks.emplace_back("b_frozen_after_change", verdict(frozen));
  t.checks.emplace_back("post_change_gap_decreasing", verdict(strictly_decreasing(t, 3)));
  t.checks.emplace_back("gap_b_decreasing", verdict(strictly_decreasing(t, 2)));
  return t;
}

inline ExperimentTable experiment_mu_sweep(const ScenarioConfig& c, const std::vector<double>& mus, unsigned threads) {
  if (!c.h_term) throw ConfigError("h_term", "required for the mu sweep");
  const Grid grid(c.n_points);
  const Problem p = build_problem(c);
  const GridFunction phi = build_initial(c, grid);
  const auto [h, h_prime] = build_h_term(*c.h_term);

  struct Run {
    SolveResult result;
    double box;
  };
  std::vector<double> all = {0.0};
  all.insert(all.end(), mus.begin(), mus.end());
  const auto runs = parallel_map<Run>(all.size(), threads, [&](std::size_t i) {
    const double box = scenario_box(c, p, phi, all[i]);
    return Run{mu_regularized_solve(phi, c.b_bar, p, h, h_prime, all[i], continuation_options(c, box)), box};
  });

  ExperimentTable t;
  t.name = "mu_sweep";
  t.parameter_name = "mu";
  t.columns = {"dist_sup", "dist_lq", "box_U"};
  const SolveResult& base = runs[0].result;
  for (std::size_t i = 0; i < all.size(); ++i) {
    const SolveResult& r = runs[i].result;
    TableRow row;
    row.parameter = all[i];
    row.values = {field_sup_gap(r, base), space_time_lq(field_difference(r, base), c.dt, 4.0), runs[i].box};
    row.verdict = r.termination.describe();
    if (!std::isfinite(runs[i].box)) row.note = "no invariant box";
    t.rows.push_back(std::move(row));
  }
  t.checks.emplace_back("zero_row_distance_zero", verdict(t.rows[0].values[0] == 0.0 && t.rows[0].values[1] == 0.0));
  t.checks.emplace_back("dist_sup_decreasing", verdict(strictly_decreasing(t, 0, 1)));
  t.checks.emplace_back("dist_lq_decreasing", verdict(strictly_decreasing(t, 1, 1)));
  bool boxes = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i) boxes = boxes && std::isfinite(t.rows[i].values[2]);
  t.checks.emplace_back("box_for_every_positive_mu", verdict(boxes));
  return t;
}

struct RefinementLevel {
  std::size_t n_points;
  double dt;
};

/// u = e^{-t} x^2 (1-x)^2 with its exact forcing; returns the sup error at the horizon.
inline double manufactured_error(std::size_t n_points, double dt, double horizon, double theta = 0.5) {
  const Grid grid(n_points);
  auto profile = [](double x) { return x * x * (1.0 - x) * (1.0 - x); };
  auto curvature = [](double x) { return 2.0 - 12.0 * x + 12.0 * x * x; };
  GridFunction u = GridFunction::sample(grid, profile);
  const auto steps = static_cast<std::size_t>(std::llround(horizon / dt));
  for (std::size_t k = 0; k < steps; ++k) {
    const double t_mid = (static_cast<double>(k) + theta) * dt;
    const GridFunction f =
        GridFunction::sample(grid, [&](double x) { return -std::exp(-t_mid) * (profile(x) + curvature(x)); });
    u = neumann_heat_step(u, f, dt, theta);
  }
  const double t_end = static_cast<double>(steps) * dt;
  double err = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    err = std::max(err, std::abs(u[i] - std::exp(-t_end) * profile(grid.node(i))));
  }
  return err;
}

/// Level k+1 sampled back onto level k's nodes and time levels.
inline double self_gap_u(const SolveResult& coarse, const SolveResult& fine) {
  const std::size_t sx = (fine.grid.size() - 1) / (coarse.grid.size() - 1);
  const std::size_t st = std::max<std::size_t>(1, (fine.times.size() - 1) / std::max<std::size_t>(1, coarse.times.size() - 1));
  double g = 0.0;
  for (std::size_t k = 0; k < coarse.times.size() && k * st < fine.times.size(); ++k) {
    for (std::size_t i = 0; i < coarse.grid.size(); ++i) {
      g = std::max(g, std::abs(coarse.u.levels[k][i] - fine.u.levels[k * st][i * sx]));
    }
  }
  return g;
}

inline double self_gap_b(const SolveResult& coarse, const SolveResult& fine) {
  const std::size_t st = std::max<std::size_t>(1, (fine.times.size() - 1) / std::max<std::size_t>(1, coarse.times.size() - 1));
  double g = 0.0;
  for (std::size_t k = 0; k < coarse.times.size() && k * st < fine.times.size(); ++k) {
    g = std::max(g, std::abs(coarse.boundary.b_values[k] - fine.boundary.b_values[k * st]));
  }
  return g;
}

inline ExperimentTable experiment_refinement(const ScenarioConfig& c, const std::vector<RefinementLevel>& levels,
                                             unsigned threads) {
  struct Pair {
    SolveResult fp;
    SolveResult direct;
    double manufactured;
  };
  const auto runs = parallel_map<Pair>(levels.size(), threads, [&](std::size_t i) {
    ScenarioConfig ci = c;
    ci.n_points = levels[i].n_points;
    ci.dt = levels[i].dt;
    const Grid grid(ci.n_points);
    const Problem p = build_problem(ci);
    const GridFunction phi = build_initial(ci, grid);
    const double box = scenario_box(ci, p, phi);
    return Pair{solve_with(ci, p, phi, ci.b_bar, SolverMethod::fixed_point, box),
                solve_with(ci, p, phi, ci.b_bar, SolverMethod::direct, box),
                manufactured_error(ci.n_points, ci.dt, c.horizon)};
  });

  ExperimentTable t;
  t.name = "refinement";
  t.parameter_name = "N";
  t.columns = {"dt", "gap_fp_direct", "self_gap_u", "self_gap_b", "order_u", "order_b", "manufactured_error",
               "manufactured_order"};
  for (std::size_t i = 0; i < levels.size(); ++i) {
    TableRow row;
    row.parameter = static_cast<double>(levels[i].n_points);
    const double gap = field_sup_gap(runs[i].fp, runs[i].direct);
    double su = std::nan(""), sb = std::nan(""), ou = std::nan(""), ob = std::nan(""), om = std::nan("");
    if (i + 1 < levels.size()) {
      su = self_gap_u(runs[i].fp, runs[i + 1].fp);
      sb = self_gap_b(runs[i].fp, runs[i + 1].fp);
    }
    if (i > 0) {
      om = std::log2(runs[i - 1].manufactured / runs[i].manufactured);
      const double su_prev = t.rows[i - 1].values[2];
      const double sb_prev = t.rows[i - 1].values[3];
      if (i + 1 < levels.size()) {
        ou = std::log2(su_prev / su);
        ob = std::log2(sb_prev / sb);
      }
    }
    row.values = {levels[i].dt, gap, su, sb, ou, ob, runs[i].manufactured, om};
    row.verdict = runs[i].fp.termination.describe();
    t.rows.push_back(std::move(row));
  }
  bool gaps = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i) gaps = gaps && t.rows[i].values[1] < t.rows[i - 1].values[1];
  t.checks.emplace_back("gap_fp_direct_decreasing", verdict(gaps));
  bool man = true;
  for (std::size_t i = 1; i < t.rows.size(); ++i) man = man && t.rows[i].values[7] > 1.8;
  t.checks.emplace_back("manufactured_order_near_2", verdict(man));
  return t;
}

inline std::vector<RefinementLevel> parse_levels(const json& e) {
  std::vector<RefinementLevel> out;
  if (!e.contains("levels") || !e["levels"].is_array()) throw ConfigError("experiment.levels", "required array");
  for (const auto& l : e["levels"]) {
    if (!l.is_object() || !l.contains("N") || !l.contains("dt")) {
      throw ConfigError("experiment.levels", "each level needs N and dt");
    }
    out.push_back({l["N"].get<std::size_t>(), l["dt"].get<double>()});
  }
  for (std::size_t i = 1; i < out.size(); ++i) {
    if ((out[i].n_points - 1) % (out[i - 1].n_points - 1) != 0) {
      throw ConfigError("experiment.levels", "N - 1 must nest across levels");
    }
  }
  return out;
}

inline ExperimentTable run_experiment_table(const ScenarioConfig& c, unsigned threads) {
  if (c.experiment.is_null()) throw ConfigError("experiment", "config has no experiment block");
  const std::string type = c.experiment["type"].get<std::string>();
  const json& e = c.experiment;
  if (type == "continuous_dependence") {
    return experiment_continuous_dependence(c, json_numbers(e, "deltas", {0.1, 0.05, 0.025, 0.0125}),
                                            json_number(e, "interface_scale", 1.0), threads);
  }
  if (type == "topology_change") {
    return experiment_topology_change(c, json_numbers(e, "deltas", {0.1, 0.05, 0.025, 0.0125}), threads);
  }
  if (type == "mu_sweep") return experiment_mu_sweep(c, json_numbers(e, "mus", {0.4, 0.2, 0.1, 0.05}), threads);
  if (type == "refinement") return experiment_refinement(c, parse_levels(e), threads);
  throw ConfigError("experiment.type", "unknown experiment '" + type + "'");
}

enum ExitCode { exit_ok = 0, exit_config = 1, exit_regime = 2 };

inline int exit_code_for(const SolveResult& r) {
  return r.termination.kind == TerminationKind::regime_violation ? exit_regime : exit_ok;
}

/// Solve per the config and write CSVs plus summary.txt into `dir`.
inline int run_scenario(const ScenarioConfig& c, const std::filesystem::path& dir, unsigned threads) {
  const Grid grid(c.n_points);
  const Problem p = build_problem(c);
  const GridFunction phi = build_initial(c, grid);
  const double box = scenario_box(c, p, phi);

  Summary s;
  s.emplace_back("scenario", c.name);
  s.emplace_back("N", std::to_string(c.n_points));
  s.emplace_back("dt", fmt_num(c.dt));
  s.emplace_back("horizon", fmt_num(c.horizon));

  if (c.method == "both") {
    const auto results = parallel_map<SolveResult>(2, threads, [&](std::size_t i) {
      return solve_with(c, p, phi, c.b_bar, i == 0 ? SolverMethod::fixed_point : SolverMethod::direct, box);
    });
    write_solve_result(dir, results[0], c.output_every);
    write_solve_result(dir / "direct", results[1], c.output_every);
    append_result_summary(s, "", results[0]);
    append_result_summary(s, "direct_", results[1]);
    s.emplace_back("cross_method_sup_gap", fmt_num(field_sup_gap(results[0], results[1])));
    write_summary(dir / "summary.txt", s);
    return std::max(exit_code_for(results[0]), exit_code_for(results[1]));
  }
  const SolverMethod m = c.method == "direct" ? SolverMethod::direct : SolverMethod::fixed_point;
  const SolveResult r = solve_with(c, p, phi, c.b_bar, m, box);
  write_solve_result(dir, r, c.output_every);
  append_result_summary(s, "", r);
  write_summary(dir / "summary.txt", s);
  return exit_code_for(r);
}

inline int run_experiment(const ScenarioConfig& c, const std::filesystem::path& dir, unsigned threads) {
  const ExperimentTable t = run_experiment_table(c, threads);
  write_table(dir / (t.name + ".csv"), t);
  Summary s;
  s.emplace_back("scenario", c.name);
  s.emplace_back("experiment", t.name);
  for (const auto& check : t.checks) s.push_back(check);
  write_summary(dir / "summary.txt", s);
  return exit_ok;
}

}  // namespace relaypde
