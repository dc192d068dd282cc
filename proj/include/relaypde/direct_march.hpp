#pragma once

#include <cmath>
#include <vector>

#include "relaypde/fixed_point.hpp"
#include "relaypde/heat.hpp"
#include "relaypde/norms.hpp"
#include "relaypde/relay.hpp"
#include "relaypde/solve_result.hpp"
#include "relaypde/spatial.hpp"

namespace relaypde {

struct DirectOptions {
  double dt = 1e-4;
  double theta = 0.5;
  double box_U = std::numeric_limits<double>::infinity();
};

namespace detail {

inline std::vector<double> relay_outputs(const std::vector<RelayState>& states, const std::vector<double>& u,
                                         const RelayBranches& branches) {
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = evaluate_branch(branches, states[i].config, u[i]);
  return v;
}

inline bool advance_all(std::vector<RelayState>& states, double t, const std::vector<double>& u,
                        const Thresholds& thr) {
  bool switched = false;
  for (std::size_t i = 0; i < u.size(); ++i) switched |= step_relay(states[i], t, u[i], thr);
  return switched;
}

/// Root-based boundary with fallbacks for data outside the single-root regime.
inline double boundary_from_level(const GridFunction& u, double b_bar, const Thresholds& thr, const ConfigLevel& xi) {
  try {
    return find_alpha_root(u, b_bar, thr);
  } catch (const RegimeViolation&) {
    return 1.0;
  } catch (const MultipleRoots&) {
    const auto ifc = interfaces_of(u.grid, xi);
    return ifc.empty() ? b_bar : ifc.front();
  }
}

}  // namespace detail

/// Step-by-step coupling: source frozen from the relays at the start of each
/// step, relays re-advanced with the new profile. A step during which any
/// relay switches is retaken as two implicit half steps.
inline SolveResult direct_march(const WindowStart& start, const Problem& problem, std::size_t steps,
                                const DirectOptions& opts) {
  const Grid& grid = start.phi.grid;
  const auto& thr = problem.branches.thresholds;
  const double h = grid.spacing();
  if (!consistency_check(start.phi, start.xi0, thr).pass) {
    throw std::invalid_argument("direct_march: initial configuration inconsistent with phi");
  }

  SolveResult r(grid);
  r.diagnostics.method = "direct";
  r.diagnostics.box_U = opts.box_U;
  r.times = window_times(start.t0, opts.dt, steps);

  std::vector<RelayState> states(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    states[i] = make_relay_state(start.xi0.config[i], start.t0, start.phi[i], thr);
  }
  auto config_row = [&]() {
    ConfigLevel row(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) row[i] = states[i].config;
    return row;
  };

  std::vector<double> u = start.phi.values;
  r.u.push(u);
  r.v.push(detail::relay_outputs(states, u, problem.branches));
  r.xi.push_back(config_row());
  r.boundary.times.push_back(start.t0);
  r.boundary.a_values.push_back(detail::boundary_from_level(start.phi, start.b_bar, thr, r.xi.back()));

  for (std::size_t k = 0; k < steps; ++k) {
    const double t = r.times[k];
    const double t_next = r.times[k + 1];
    const std::vector<double> v = detail::relay_outputs(states, u, problem.branches);
    std::vector<RelayState> trial = states;
    std::vector<double> u_next = semilinear_step(u, v, v, problem.reaction, h, opts.dt, opts.theta);
    if (detail::advance_all(trial, t_next, u_next, thr)) {
      trial = states;
      const double half = 0.5 * opts.dt;
      const std::vector<double> u_half = semilinear_step(u, v, v, problem.reaction, h, half, 1.0);
      detail::advance_all(trial, t + half, u_half, thr);
      const std::vector<double> v_half = detail::relay_outputs(trial, u_half, problem.branches);
      u_next = semilinear_step(u_half, v_half, v_half, problem.reaction, h, half, 1.0);
      detail::advance_all(trial, t_next, u_next, thr);
      ++r.diagnostics.implicit_steps;
    }
    states = std::move(trial);
    u = std::move(u_next);
    r.u.push(u);
    r.v.push(detail::relay_outputs(states, u, problem.branches));
    r.xi.push_back(config_row());
    r.boundary.times.push_back(t_next);
    r.boundary.a_values.push_back(detail::boundary_from_level(GridFunction(grid, u), start.b_bar, thr, r.xi.back()));
  }
  r.boundary.b_values = running_max(r.boundary.a_values);

  for (const auto& row : r.u.levels) {
    const double m = sup_norm(row);
    r.diagnostics.max_abs_u.push_back(m);
    if (!(m < opts.box_U)) r.diagnostics.within_box = false;
  }

  const TopologyTrace topo = topology_extract(grid, r.xi);
  r.termination.kind = TerminationKind::horizon_reached;
  r.termination.time = r.times.back();
  for (std::size_t k = 1; k < topo.counts.size(); ++k) {
    if (topo.counts[k] != topo.counts[0]) {
      r.termination.kind = TerminationKind::topology_changed;
      r.termination.time = r.times[k];
      break;
    }
  }
  return r;
}

}  // namespace relaypde
