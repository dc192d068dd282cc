#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "relaypde/errors.hpp"
#include "relaypde/heat.hpp"
#include "relaypde/norms.hpp"
#include "relaypde/relay.hpp"
#include "relaypde/solve_result.hpp"
#include "relaypde/spatial.hpp"

namespace relaypde {

struct Problem {
  RelayBranches branches;
  ReactionTerm reaction;
};

/// Data at the start of a window: profile, interface position, and the
/// configuration row (1 left of the interface).
struct WindowStart {
  GridFunction phi;
  double b_bar;
  SpatialConfiguration xi0;
  double t0 = 0.0;

  static WindowStart single_interface(const GridFunction& phi, double b_bar, double t0 = 0.0) {
    return {phi, b_bar, SpatialConfiguration::from_interface(phi.grid, b_bar), t0};
  }
};

struct MapOutput {
  SpaceTimeField u;
  std::vector<double> a;
  std::vector<double> b;
  std::optional<std::size_t> topology_index;  // first level with psi below alpha on all of [b_bar, 1]
  std::size_t implicit_steps = 0;
  bool admissible = true;
};

/// One application of (u0, b0) -> (u, b): branch field from b0, frozen-source
/// solve, alpha-root per level, running max.
inline MapOutput schauder_map_R(const SpaceTimeField& u0, const std::vector<double>& b0, const GridFunction& phi,
                                double b_bar, const Problem& problem, double dt, double theta,
                                double box_U = std::numeric_limits<double>::infinity(),
                                std::optional<int> m = std::nullopt) {
  const Grid& grid = phi.grid;
  const SpaceTimeField v0 = build_v0(u0, b0, problem.branches);

  // the source jumps in time where a node changes side of b0 within a step
  std::vector<bool> mask(b0.size() > 0 ? b0.size() - 1 : 0, false);
  std::size_t implicit = 0;
  for (std::size_t k = 0; k + 1 < b0.size(); ++k) {
    const double lo = std::min(b0[k], b0[k + 1]);
    const double hi = std::max(b0[k], b0[k + 1]);
    if (lo == hi) continue;
    const auto first = static_cast<std::size_t>(std::floor(lo / grid.spacing())) + 1;
    if (first < grid.size() && grid.node(first) <= hi) {
      mask[k] = true;
      ++implicit;
    }
  }

  MapOutput out{solve_frozen(phi, v0, problem.reaction, dt, theta, mask), {}, {}, std::nullopt, implicit, true};
  out.a.resize(b0.size());
  for (std::size_t k = 0; k < b0.size(); ++k) {
    if (out.topology_index) {
      out.a[k] = 1.0;
      continue;
    }
    try {
      out.a[k] = find_alpha_root(out.u.level(k), b_bar, problem.branches.thresholds);
    } catch (const RegimeViolation&) {
      out.a[k] = 1.0;
      out.topology_index = k;
    }
  }
  out.b = running_max(out.a);

  for (const auto& row : out.u.levels) {
    if (sup_norm(row) > box_U) out.admissible = false;
  }
  if (m) {
    for (double bk : out.b) {
      if (bk < b_bar || bk > b_bar + 1.0 / *m) out.admissible = false;
    }
  }
  return out;
}

struct FixedPointOptions {
  double dt = 1e-4;
  double theta = 0.5;
  double tol = 1e-9;
  int max_iter = 40;
  double box_U = std::numeric_limits<double>::infinity();
  std::optional<int> m;
};

struct FixedPointWindow {
  SolveResult result;
  int iterations = 0;
  std::optional<std::size_t> topology_index;
  bool admissible = true;
};

inline std::vector<double> window_times(double t0, double dt, std::size_t steps) {
  std::vector<double> t(steps + 1);
  for (std::size_t k = 0; k <= steps; ++k) t[k] = t0 + static_cast<double>(k) * dt;
  return t;
}

/// Picard iteration of the map above from (phi constant in time, b = b_bar)
/// over `steps` steps of size opts.dt.
inline FixedPointWindow fixed_point_solve(const WindowStart& start, const Problem& problem, std::size_t steps,
                                          const FixedPointOptions& opts) {
  if (steps < 1) throw std::invalid_argument("fixed_point_solve: need at least one step");
  const Grid& grid = start.phi.grid;
  const auto times = window_times(start.t0, opts.dt, steps);

  SpaceTimeField u(grid);
  u.levels.assign(times.size(), start.phi.values);
  std::vector<double> b(times.size(), start.b_bar);

  std::optional<MapOutput> last;
  int iterations = 0;
  bool converged = false;
  std::size_t implicit_total = 0;
  while (iterations < opts.max_iter) {
    MapOutput next =
        schauder_map_R(u, b, start.phi, start.b_bar, problem, opts.dt, opts.theta, opts.box_U, opts.m);
    ++iterations;
    implicit_total = next.implicit_steps;
    double du = 0.0;
    for (std::size_t k = 0; k < times.size(); ++k) du = std::max(du, sup_distance(u.levels[k], next.u.levels[k]));
    const double db = sup_distance(b, next.b);
    u = next.u;
    b = next.b;
    last = std::move(next);
    if (du + db < opts.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    throw FixedPointNonConvergence("fixed_point_solve: no convergence after " + std::to_string(opts.max_iter) +
                                   " iterations");
  }

  FixedPointWindow window{SolveResult(grid), iterations, last->topology_index, last->admissible};
  SolveResult& r = window.result;
  r.times = times;
  r.u = u;
  r.boundary = FreeBoundaryTrace{times, last->a, b};

  // per-node relays over the converged u; should reproduce the boundary-selected branches
  HysteresisField hyst = distributed_hysteresis(start.xi0, u, times, problem.branches);
  const SpaceTimeField v_boundary = build_v0(u, b, problem.branches);
  const ConfigField xi_boundary = configs_from_boundary(grid, b);
  for (std::size_t k = 0; k < times.size(); ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (hyst.xi[k][i] != xi_boundary[k][i]) ++r.diagnostics.v_mismatch;
    }
  }
  r.v = v_boundary;
  r.xi = xi_boundary;

  r.diagnostics.method = "fixed_point";
  r.diagnostics.implicit_steps = implicit_total;
  r.diagnostics.box_U = opts.box_U;
  for (const auto& row : u.levels) {
    const double m = sup_norm(row);
    r.diagnostics.max_abs_u.push_back(m);
    if (!(m < opts.box_U)) r.diagnostics.within_box = false;
  }
  r.termination.kind = TerminationKind::horizon_reached;
  r.termination.time = times.back();
  if (window.topology_index) {
    r.termination.kind = TerminationKind::topology_changed;
    r.termination.time = times[*window.topology_index];
  }
  return window;
}

}  // namespace relaypde
