#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "relaypde/direct_march.hpp"
#include "relaypde/dissipation.hpp"
#include "relaypde/errors.hpp"
#include "relaypde/fixed_point.hpp"
#include "relaypde/norms.hpp"
#include "relaypde/solve_result.hpp"
#include "relaypde/spatial.hpp"

namespace relaypde {

enum class SolverMethod { fixed_point, direct };

struct ContinuationOptions {
  double dt = 1e-4;
  double theta = 0.5;
  double horizon = 0.05;
  double c_w = 0.1;
  int m_max = 1000;
  double tol = 1e-9;
  int max_iter = 40;
  double box_U = std::numeric_limits<double>::infinity();
  NormParams norm;
  // transversality tolerances; <= 0 selects 10 h
  double tol_value = 0.0;
  double tol_slope = 0.0;
  int window_halvings = 4;
};

struct Certification {
  EmCertificate cert;
  double trace_norm = 0.0;
};

inline Certification certify(const GridFunction& phi, double b_bar, const Thresholds& thr, int m_max,
                             const NormParams& params) {
  Certification c;
  c.trace_norm = trace_norm(phi, params);
  if (!(b_bar > 0.0 && b_bar < 1.0)) {
    c.cert.failing_clause = 1;
    return c;
  }
  c.cert = em_classify(phi, derivative(phi), b_bar, c.trace_norm, thr, m_max);
  return c;
}

namespace detail {

inline void append_window(SolveResult& total, const SolveResult& w, std::size_t count, bool skip_first) {
  for (std::size_t k = skip_first ? 1 : 0; k < count; ++k) {
    total.times.push_back(w.times[k]);
    total.u.push(w.u.levels[k]);
    total.v.push(w.v.levels[k]);
    total.xi.push_back(w.xi[k]);
    total.boundary.times.push_back(w.boundary.times[k]);
    total.boundary.a_values.push_back(w.boundary.a_values[k]);
    total.boundary.b_values.push_back(w.boundary.b_values[k]);
    total.diagnostics.max_abs_u.push_back(w.diagnostics.max_abs_u[k]);
  }
  total.diagnostics.implicit_steps += w.diagnostics.implicit_steps;
  total.diagnostics.v_mismatch += w.diagnostics.v_mismatch;
  total.diagnostics.within_box = total.diagnostics.within_box && w.diagnostics.within_box;
}

/// Subsamples a window computed at half the step back to the original level spacing.
inline FixedPointWindow coarsen(FixedPointWindow w) {
  SolveResult& r = w.result;
  SolveResult c(r.grid);
  c.termination = r.termination;
  c.diagnostics = r.diagnostics;
  c.diagnostics.max_abs_u.clear();
  for (std::size_t k = 0; k < r.times.size(); k += 2) {
    c.times.push_back(r.times[k]);
    c.u.push(r.u.levels[k]);
    c.v.push(r.v.levels[k]);
    c.xi.push_back(r.xi[k]);
    c.boundary.times.push_back(r.boundary.times[k]);
    c.boundary.a_values.push_back(r.boundary.a_values[k]);
    c.boundary.b_values.push_back(r.boundary.b_values[k]);
    c.diagnostics.max_abs_u.push_back(r.diagnostics.max_abs_u[k]);
  }
  if (w.topology_index) w.topology_index = (*w.topology_index + 1) / 2;
  w.result = std::move(c);
  return w;
}

/// Marches u_t = u_xx + f(u, H1(u)) with the whole interval in configuration 1.
inline void single_branch_tail(SolveResult& total, const Problem& problem, double dt, double theta,
                               std::size_t steps, double box_U) {
  const Grid& grid = total.grid;
  const auto& branches = problem.branches;
  ReactionTerm collapsed;
  collapsed.f = [&](double u, double) { return problem.reaction(u, evaluate_branch(branches, Config::one, u)); };
  std::vector<double> u = total.u.levels.back();
  const std::vector<double> dummy(grid.size(), 0.0);
  double t = total.times.back();
  const ConfigLevel ones(grid.size(), Config::one);
  for (std::size_t k = 0; k < steps; ++k) {
    u = semilinear_step(u, dummy, dummy, collapsed, grid.spacing(), dt, theta);
    t += dt;
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = evaluate_branch(branches, Config::one, u[i]);
    total.times.push_back(t);
    total.u.push(u);
    total.v.push(std::move(v));
    total.xi.push_back(ones);
    total.boundary.times.push_back(t);
    total.boundary.a_values.push_back(1.0);
    total.boundary.b_values.push_back(1.0);
    const double m = sup_norm(u);
    total.diagnostics.max_abs_u.push_back(m);
    if (!(m < box_U)) total.diagnostics.within_box = false;
  }
}

/// True when the near-alpha node at `node` belongs to a configuration-2 run
/// reaching the right end on which u never decreases, or when every node from
/// there to the end lies within tol of alpha. Either way the run is about to
/// drop below alpha at the end rather than touching it inside.
inline bool pending_topology(const GridFunction& u, const ConfigLevel& xi, std::size_t node, double alpha, double tol) {
  const std::size_t n = u.size();
  bool within = true;
  for (std::size_t i = node; i < n; ++i) within = within && std::abs(u[i] - alpha) <= tol;
  if (within) return true;
  if (xi[node] != Config::two) return false;
  std::size_t first = node;
  while (first > 0 && xi[first - 1] == Config::two) --first;
  for (std::size_t i = first; i < n; ++i) {
    if (xi[i] != Config::two) return false;
    if (i > first && u[i] < u[i - 1] - 1e-12) return false;
  }
  return true;
}

}  // namespace detail

/// Window-by-window fixed-point solves to the horizon or the first classified event.
inline SolveResult continuation(const GridFunction& phi, double b_bar, const Problem& problem,
                                const ContinuationOptions& opts) {
  const Grid& grid = phi.grid;
  const auto& thr = problem.branches.thresholds;
  const double h = grid.spacing();
  const double tol_value = opts.tol_value > 0.0 ? opts.tol_value : 10.0 * h;
  const double tol_slope = opts.tol_slope > 0.0 ? opts.tol_slope : 10.0 * h;
  const auto total_steps = static_cast<std::size_t>(std::llround(opts.horizon / opts.dt));

  SolveResult total(grid);
  total.diagnostics.method = "fixed_point";
  total.diagnostics.box_U = opts.box_U;

  auto terminate = [&](TerminationKind kind, double time, std::string detail) {
    total.termination.kind = kind;
    total.termination.time = time;
    total.termination.detail = std::move(detail);
  };

  Certification cert = certify(phi, b_bar, thr, opts.m_max, opts.norm);
  if (!cert.cert.m) {
    total.times.push_back(0.0);
    total.u.push(phi.values);
    total.v.push(build_v0(total.u, {b_bar}, problem.branches).levels[0]);
    total.xi.push_back(SpatialConfiguration::from_interface(grid, b_bar).config);
    total.boundary = {{0.0}, {b_bar}, {b_bar}};
    total.diagnostics.max_abs_u.push_back(sup_norm(phi));
    terminate(TerminationKind::regime_violation, 0.0,
              "initial data not certified (clause " + std::to_string(cert.cert.failing_clause) + ")");
    return total;
  }
  int m = *cert.cert.m;

  WindowStart start = WindowStart::single_interface(phi, b_bar, 0.0);
  std::size_t done = 0;
  bool first = true;

  while (done < total_steps) {
    const std::size_t remaining = total_steps - done;
    const double window_len = opts.c_w / (static_cast<double>(m) * m);
    std::size_t steps = std::clamp<std::size_t>(static_cast<std::size_t>(std::floor(window_len / opts.dt)), 1,
                                                remaining);

    std::optional<FixedPointWindow> win;
    std::string failure;
    FixedPointOptions fp{opts.dt, opts.theta, opts.tol, opts.max_iter, opts.box_U, m};
    for (int attempt = 0; attempt <= opts.window_halvings && !win; ++attempt) {
      try {
        win = fixed_point_solve(start, problem, steps, fp);
      } catch (const FixedPointNonConvergence& e) {
        failure = e.what();
      } catch (const MultipleRoots& e) {
        failure = e.what();
      }
      if (!win) {
        if (steps == 1) break;
        steps = std::max<std::size_t>(1, steps / 2);
      }
    }
    if (!win) {
      FixedPointOptions fine = fp;
      fine.dt = 0.5 * opts.dt;
      try {
        win = detail::coarsen(fixed_point_solve(start, problem, 2 * steps, fine));
      } catch (const FixedPointNonConvergence& e) {
        failure = e.what();
      } catch (const MultipleRoots& e) {
        failure = e.what();
      }
    }
    if (!win) {
      if (first) {
        total.times.push_back(0.0);
        total.u.push(phi.values);
        total.v.push(build_v0(total.u, {b_bar}, problem.branches).levels[0]);
        total.xi.push_back(start.xi0.config);
        total.boundary = {{0.0}, {b_bar}, {b_bar}};
        total.diagnostics.max_abs_u.push_back(sup_norm(phi));
      }
      terminate(TerminationKind::regime_violation, start.t0, failure);
      return total;
    }

    SolveResult& w = win->result;
    std::size_t accept = w.times.size();
    std::optional<Termination> event;

    // tolerance pre-screen on every level of the window
    for (std::size_t k = 1; k < w.times.size() && !event; ++k) {
      if (win->topology_index && k >= *win->topology_index) break;
      const GridFunction level = w.u.level(k);
      const SpatialConfiguration xi(grid, w.xi[k]);
      const auto verdict = transversality_check(level, derivative(level), xi, thr, tol_value, tol_slope);
      if (!verdict.transverse) {
        if (verdict.kind == TouchKind::alpha_touch &&
            detail::pending_topology(level, w.xi[k], verdict.node, thr.alpha, tol_value)) {
          continue;
        }
        Termination t;
        t.kind = TerminationKind::transversality_failed;
        t.time = w.times[k];
        t.location = verdict.location;
        t.touch = verdict.kind;
        t.detail = "tolerance check";
        event = t;
        accept = k + 1;
      }
    }

    detail::append_window(total, w, accept, !first);
    total.diagnostics.windows.push_back({start.t0, w.times[accept - 1] - start.t0, m, win->iterations,
                                         cert.trace_norm});
    first = false;
    done += accept - 1;

    if (event) {
      total.termination = *event;
      return total;
    }

    if (win->topology_index) {
      const double t_star = w.times[*win->topology_index];
      terminate(TerminationKind::topology_changed, t_star, "right end dropped below alpha");
      total.diagnostics.terminal_single_branch_from = w.times.back();
      detail::single_branch_tail(total, problem, opts.dt, opts.theta, total_steps - done, opts.box_U);
      return total;
    }

    if (done >= total_steps) break;

    // restart data and re-certification at the window end
    const GridFunction u_end = w.u.level(accept - 1);
    const double b_end = w.boundary.b_values[accept - 1];
    start = WindowStart{u_end, b_end, SpatialConfiguration(grid, w.xi[accept - 1]), w.times[accept - 1]};
    cert = certify(u_end, b_end, thr, opts.m_max, opts.norm);
    if (cert.cert.m) {
      m = *cert.cert.m;
      continue;
    }
    const bool near_end = u_end[grid.size() - 1] <= thr.alpha + tol_value || b_end >= 1.0 - 1.0 / opts.m_max;
    if (near_end) continue;  // keep the last window size until the right end drops
    const int clause = cert.cert.failing_clause;
    if (clause == 5) {
      terminate(TerminationKind::regime_violation, start.t0, "trace norm exceeds m_max");
      return total;
    }
    Termination t;
    t.kind = TerminationKind::transversality_failed;
    t.time = start.t0;
    t.touch = clause == 2 ? TouchKind::beta_touch : TouchKind::alpha_touch;
    t.location = b_end;
    t.detail = "E_m re-certification failed at clause " + std::to_string(clause);
    total.termination = t;
    return total;
  }

  terminate(TerminationKind::horizon_reached, total.times.back(), "");
  return total;
}

/// Continuation with f replaced by f - mu h. mu = 0 runs the unmodified problem.
inline SolveResult mu_regularized_solve(const GridFunction& phi, double b_bar, const Problem& problem,
                                        const std::function<double(double)>& h_term,
                                        const std::function<double(double)>& h_prime, double mu,
                                        const ContinuationOptions& opts, SolverMethod method = SolverMethod::fixed_point,
                                        double sign_check_range = 10.0) {
  if (!(mu >= 0.0)) throw std::invalid_argument("mu_regularized_solve: mu must be nonnegative");
  for (int s = 1; s <= 200; ++s) {
    const double u = sign_check_range * s / 200.0;
    if (!(u * h_term(u) > 0.0) || !(-u * h_term(-u) > 0.0)) {
      throw std::invalid_argument("mu_regularized_solve: h must satisfy u h(u) > 0 for u != 0");
    }
  }
  Problem p = problem;
  if (mu != 0.0) p.reaction = regularized_reaction(problem.reaction, h_term, h_prime, mu);
  if (method == SolverMethod::fixed_point) return continuation(phi, b_bar, p, opts);
  DirectOptions d{opts.dt, opts.theta, opts.box_U};
  const auto steps = static_cast<std::size_t>(std::llround(opts.horizon / opts.dt));
  return direct_march(WindowStart::single_interface(phi, b_bar), p, steps, d);
}

}  // namespace relaypde
