#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaypde/errors.hpp"
#include "relaypde/grid.hpp"
#include "relaypde/tridiagonal.hpp"

namespace relaypde {

struct ReactionTerm {
  std::function<double(double, double)> f;
  std::function<double(double, double)> df_du;  // optional; finite differences otherwise
  std::optional<double> lipschitz;

  double operator()(double u, double v) const { return f(u, v); }

  double du(double u, double v) const {
    if (df_du) return df_du(u, v);
    const double eps = 1e-7 * std::max(1.0, std::abs(u));
    return (f(u + eps, v) - f(u - eps, v)) / (2.0 * eps);
  }
};

/// f(u, v) = -d u + v
inline ReactionTerm make_linear_reaction(double d) {
  return ReactionTerm{[d](double u, double v) { return -d * u + v; }, [d](double, double) { return -d; }, d + 1.0};
}

inline ReactionTerm zero_reaction() {
  return ReactionTerm{[](double, double) { return 0.0; }, [](double, double) { return 0.0; }, 0.0};
}

namespace detail {

/// Neumann Laplacian with ghost-node reflection.
inline std::vector<double> apply_laplacian(const std::vector<double>& u, double h) {
  const std::size_t n = u.size();
  const double inv_h2 = 1.0 / (h * h);
  std::vector<double> out(n);
  out[0] = 2.0 * (u[1] - u[0]) * inv_h2;
  out[n - 1] = 2.0 * (u[n - 2] - u[n - 1]) * inv_h2;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_h2;
  return out;
}

/// Solves (I - c L - diag(extra)) x = rhs.
inline std::vector<double> solve_shifted(double c, double h, const std::vector<double>& extra,
                                         const std::vector<double>& rhs) {
  const std::size_t n = rhs.size();
  const double r = c / (h * h);
  std::vector<double> lower(n, -r), diag(n), upper(n, -r);
  for (std::size_t i = 0; i < n; ++i) diag[i] = 1.0 + 2.0 * r - extra[i];
  upper[0] = -2.0 * r;
  lower[n - 1] = -2.0 * r;
  return solve_tridiagonal(lower, diag, upper, rhs);
}

}  // namespace detail

/// One theta-step of u_t = u_xx + F with zero Neumann data; F held fixed over the step.
inline GridFunction neumann_heat_step(const GridFunction& u, const GridFunction& source, double dt, double theta) {
  require_same_grid(u, source, "neumann_heat_step");
  if (!(dt > 0.0)) throw std::invalid_argument("neumann_heat_step: dt must be positive");
  if (!(theta >= 0.5 && theta <= 1.0)) throw std::invalid_argument("neumann_heat_step: theta must lie in [1/2, 1]");
  const double h = u.grid.spacing();
  const auto lu = detail::apply_laplacian(u.values, h);
  std::vector<double> rhs(u.size());
  for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = u[i] + dt * ((1.0 - theta) * lu[i] + source[i]);
  const std::vector<double> zero(u.size(), 0.0);
  return GridFunction(u.grid, detail::solve_shifted(theta * dt, h, zero, rhs));
}

struct InnerSolveOptions {
  double tol = 1e-10;
  int max_iter = 50;
};

/// One theta-step of u_t = u_xx + f(u, v): v_old/v_new are the source data at
/// the two levels. Newton on the implicit reaction part.
inline std::vector<double> semilinear_step(const std::vector<double>& u, const std::vector<double>& v_old,
                                           const std::vector<double>& v_new, const ReactionTerm& reaction,
                                           double h, double dt, double theta, const InnerSolveOptions& opts = {}) {
  const std::size_t n = u.size();
  const auto lu = detail::apply_laplacian(u, h);
  std::vector<double> rhs(n);
  for (std::size_t i = 0; i < n; ++i) rhs[i] = u[i] + (1.0 - theta) * dt * (lu[i] + reaction(u[i], v_old[i]));

  std::vector<double> w = u;
  std::vector<double> extra(n), target(n);
  for (int it = 0; it < opts.max_iter; ++it) {
    // linearize f(w) ~ f(w_k) + f_u(w_k)(w - w_k)
    for (std::size_t i = 0; i < n; ++i) {
      const double fu = reaction.du(w[i], v_new[i]);
      extra[i] = theta * dt * fu;
      target[i] = rhs[i] + theta * dt * (reaction(w[i], v_new[i]) - fu * w[i]);
    }
    std::vector<double> next = detail::solve_shifted(theta * dt, h, extra, target);
    double change = 0.0;
    double scale = 1.0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!std::isfinite(next[i])) throw InnerIterationDivergence("semilinear_step: non-finite iterate");
      change = std::max(change, std::abs(next[i] - w[i]));
      scale = std::max(scale, std::abs(next[i]));
    }
    w = std::move(next);
    if (change <= opts.tol * scale) return w;
  }
  throw InnerIterationDivergence("semilinear_step: Newton did not reach tolerance in " +
                                 std::to_string(opts.max_iter) + " iterations");
}

/// Trajectory of u_t = u_xx + f(u, v0) from phi over the levels of v0.
/// Steps with implicit_mask[k] set (step k -> k+1) use theta = 1.
inline SpaceTimeField solve_frozen(const GridFunction& phi, const SpaceTimeField& v0, const ReactionTerm& reaction,
                                   double dt, double theta, const std::vector<bool>& implicit_mask = {},
                                   const InnerSolveOptions& opts = {}) {
  if (!(phi.grid == v0.grid)) throw std::invalid_argument("solve_frozen: grid mismatch");
  if (v0.time_count() < 1) throw std::invalid_argument("solve_frozen: empty source field");
  if (!(dt > 0.0)) throw std::invalid_argument("solve_frozen: dt must be positive");
  if (!(theta >= 0.5 && theta <= 1.0)) throw std::invalid_argument("solve_frozen: theta must lie in [1/2, 1]");
  const double h = phi.grid.spacing();
  SpaceTimeField u(phi.grid);
  u.levels.reserve(v0.time_count());
  u.push(phi.values);
  for (std::size_t k = 0; k + 1 < v0.time_count(); ++k) {
    const double th = (k < implicit_mask.size() && implicit_mask[k]) ? 1.0 : theta;
    u.push(semilinear_step(u.levels[k], v0.levels[k], v0.levels[k + 1], reaction, h, dt, th, opts));
  }
  return u;
}

inline double trapezoid_mass(const std::vector<double>& u, double h) {
  double m = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) m += (i == 0 || i + 1 == u.size() ? 0.5 : 1.0) * u[i];
  return m * h;
}

}  // namespace relaypde
