#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "relaypde/errors.hpp"
#include "relaypde/grid.hpp"
#include "relaypde/relay.hpp"

namespace relaypde {

using ConfigLevel = std::vector<Config>;
using ConfigField = std::vector<ConfigLevel>;

/// Interface positions of a configuration row: midpoints of the cells whose
/// ends carry different values.
inline std::vector<double> interfaces_of(const Grid& grid, const ConfigLevel& config) {
  std::vector<double> out;
  for (std::size_t i = 0; i + 1 < config.size(); ++i) {
    if (config[i] != config[i + 1]) out.push_back(0.5 * (grid.node(i) + grid.node(i + 1)));
  }
  return out;
}

struct SpatialConfiguration {
  Grid grid;
  ConfigLevel config;

  SpatialConfiguration(Grid g, ConfigLevel c) : grid(g), config(std::move(c)) {
    if (config.size() != grid.size()) throw std::invalid_argument("SpatialConfiguration: length mismatch");
  }

  /// 1 on x <= b_bar, 2 beyond.
  static SpatialConfiguration from_interface(Grid g, double b_bar) {
    ConfigLevel c(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) c[i] = g.node(i) <= b_bar ? Config::one : Config::two;
    return {g, std::move(c)};
  }

  /// Value `leftmost` up to the first position, alternating after each one.
  static SpatialConfiguration from_interfaces(Grid g, Config leftmost, const std::vector<double>& positions) {
    if (!std::is_sorted(positions.begin(), positions.end())) {
      throw std::invalid_argument("SpatialConfiguration: interface positions must be increasing");
    }
    ConfigLevel c(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto crossed = std::upper_bound(positions.begin(), positions.end(), g.node(i)) - positions.begin();
      const bool flipped = (crossed % 2) == 1;
      c[i] = flipped ? (leftmost == Config::one ? Config::two : Config::one) : leftmost;
    }
    return {g, std::move(c)};
  }

  Config leftmost() const { return config.front(); }
  std::vector<double> discontinuities() const { return interfaces_of(grid, config); }
};

struct ConsistencyResult {
  bool pass = true;
  std::optional<std::size_t> node;
};

inline ConsistencyResult consistency_check(const GridFunction& phi, const SpatialConfiguration& xi,
                                           const Thresholds& thr) {
  if (!(phi.grid == xi.grid)) throw std::invalid_argument("consistency_check: shape mismatch");
  for (std::size_t i = 0; i < phi.size(); ++i) {
    if ((phi[i] <= thr.alpha && xi.config[i] != Config::one) || (phi[i] >= thr.beta && xi.config[i] != Config::two)) {
      return {false, i};
    }
  }
  return {};
}

enum class TouchKind { alpha_touch, beta_touch };

inline const char* to_string(TouchKind k) { return k == TouchKind::alpha_touch ? "alpha-touch" : "beta-touch"; }

struct TransversalityVerdict {
  bool transverse = true;
  std::size_t node = 0;
  double location = 0.0;
  TouchKind kind = TouchKind::alpha_touch;
};

inline TransversalityVerdict transversality_check(const GridFunction& u, const GridFunction& ux,
                                                  const SpatialConfiguration& xi, const Thresholds& thr,
                                                  double tol_value, double tol_slope) {
  require_same_grid(u, ux, "transversality_check");
  if (!(u.grid == xi.grid)) throw std::invalid_argument("transversality_check: shape mismatch");
  const std::size_t n = u.size();
  for (std::size_t i = 0; i < n; ++i) {
    const bool endpoint = i == 0 || i + 1 == n;
    if (!endpoint && std::abs(ux[i]) > tol_slope) continue;
    const std::size_t lo = i == 0 ? 0 : i - 1;
    const std::size_t hi = std::min(n - 1, i + 1);
    auto all_equal = [&](Config c) {
      for (std::size_t j = lo; j <= hi; ++j) {
        if (xi.config[j] != c) return false;
      }
      return true;
    };
    if (std::abs(u[i] - thr.alpha) <= tol_value && !all_equal(Config::one)) {
      return {false, i, u.grid.node(i), TouchKind::alpha_touch};
    }
    if (std::abs(u[i] - thr.beta) <= tol_value && !all_equal(Config::two)) {
      return {false, i, u.grid.node(i), TouchKind::beta_touch};
    }
  }
  return {};
}

inline TransversalityVerdict transversality_check(const GridFunction& u, const SpatialConfiguration& xi,
                                                  const Thresholds& thr) {
  const double tol = 10.0 * u.grid.spacing();
  return transversality_check(u, derivative(u), xi, thr, tol, tol);
}

/// Slack of each membership clause; index 5 is the derived lower bound
/// phi(x) >= alpha + (x - b_bar)/m right of the interface.
struct EmCertificate {
  std::optional<int> m;
  std::array<double, 6> margins{};
  // first clause with negative margin at the last m tried, 0 if certified, -1 if
  // the data is inconsistent with the configuration 1 on [0, b_bar], 2 beyond
  int failing_clause = 0;
};

namespace detail {

inline std::array<double, 6> em_margins(const GridFunction& phi, const GridFunction& dphi, double b_bar,
                                        double norm_value, const Thresholds& thr, int m) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double inv_m = 1.0 / m;
  const double inv_m2 = inv_m * inv_m;
  std::array<double, 6> g{};
  g[0] = std::min(b_bar - inv_m, 1.0 - inv_m - b_bar);
  g[1] = g[2] = g[3] = g[5] = inf;
  const double right = b_bar + inv_m;
  for (std::size_t i = 0; i < phi.size(); ++i) {
    const double x = phi.grid.node(i);
    if (x <= b_bar) g[1] = std::min(g[1], thr.beta - inv_m2 - phi[i]);
    if (x >= right) g[2] = std::min(g[2], phi[i] - thr.alpha - inv_m2);
    if (x >= b_bar && x <= right && phi[i] >= thr.alpha && phi[i] <= thr.alpha + inv_m2) {
      g[3] = std::min(g[3], dphi[i] - inv_m);
    }
    if (x > b_bar && x <= right) g[5] = std::min(g[5], phi[i] - thr.alpha - (x - b_bar) * inv_m);
  }
  g[4] = m - norm_value;
  return g;
}

}  // namespace detail

/// Smallest m <= m_max for which the data belongs to the class E_m at grid
/// resolution.
inline EmCertificate em_classify(const GridFunction& phi, const GridFunction& phi_prime, double b_bar,
                                 double norm_value, const Thresholds& thr, int m_max) {
  if (!(b_bar > 0.0 && b_bar < 1.0)) throw std::invalid_argument("em_classify: b_bar must lie in (0, 1)");
  require_same_grid(phi, phi_prime, "em_classify");
  EmCertificate cert;
  if (!consistency_check(phi, SpatialConfiguration::from_interface(phi.grid, b_bar), thr).pass) {
    cert.failing_clause = -1;
    return cert;
  }
  // clause 5 rules out every m below the norm
  const int m_start = std::max(1, static_cast<int>(std::ceil(norm_value)));
  for (int m = m_start; m <= m_max; ++m) {
    const auto g = detail::em_margins(phi, phi_prime, b_bar, norm_value, thr, m);
    cert.margins = g;
    cert.failing_clause = 0;
    for (std::size_t c = 0; c < g.size(); ++c) {
      if (g[c] < 0.0) {
        cert.failing_clause = static_cast<int>(c) + 1;
        break;
      }
    }
    if (cert.failing_clause == 0) {
      cert.m = m;
      return cert;
    }
  }
  if (m_start > m_max) {
    cert.margins = detail::em_margins(phi, phi_prime, b_bar, norm_value, thr, m_max);
    cert.failing_clause = 5;
  }
  return cert;
}

/// Membership test at one fixed m.
inline bool em_member(const GridFunction& phi, const GridFunction& phi_prime, double b_bar, double norm_value,
                      const Thresholds& thr, int m) {
  if (!(b_bar > 0.0 && b_bar < 1.0)) return false;
  if (!consistency_check(phi, SpatialConfiguration::from_interface(phi.grid, b_bar), thr).pass) return false;
  const auto g = detail::em_margins(phi, phi_prime, b_bar, norm_value, thr, m);
  return std::all_of(g.begin(), g.end(), [](double v) { return v >= 0.0; });
}

/// Unique alpha-root of psi on [b_bar, 1] by linear interpolation; b_bar when
/// psi stays above alpha there.
inline double find_alpha_root(const GridFunction& psi, double b_bar, const Thresholds& thr) {
  const Grid& grid = psi.grid;
  const double h = grid.spacing();
  if (!(b_bar >= 0.0 && b_bar <= 1.0)) throw std::invalid_argument("find_alpha_root: b_bar outside [0, 1]");

  std::vector<double> xs, ys;
  const std::size_t cell = std::min(grid.size() - 2, static_cast<std::size_t>(std::floor(b_bar / h)));
  const double s = (b_bar - grid.node(cell)) / h;
  xs.push_back(b_bar);
  ys.push_back(psi[cell] + s * (psi[cell + 1] - psi[cell]) - thr.alpha);
  for (std::size_t i = cell + 1; i < grid.size(); ++i) {
    if (grid.node(i) <= b_bar) continue;
    xs.push_back(grid.node(i));
    ys.push_back(psi[i] - thr.alpha);
  }

  int roots = 0;
  double root = b_bar;
  bool any_above = false;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    if (ys[k] > 0.0) any_above = true;
    if (ys[k] == 0.0) {
      if (k == 0 || ys[k - 1] != 0.0) {
        if (++roots == 1) root = xs[k];
      }
      continue;
    }
    if (k > 0 && ys[k - 1] != 0.0 && (ys[k - 1] < 0.0) != (ys[k] < 0.0)) {
      if (++roots == 1) root = xs[k - 1] + ys[k - 1] / (ys[k - 1] - ys[k]) * (xs[k] - xs[k - 1]);
    }
  }
  if (roots > 1) throw MultipleRoots("find_alpha_root: " + std::to_string(roots) + " roots right of the interface");
  if (!any_above && roots == 0) throw RegimeViolation("find_alpha_root: psi below alpha on the whole right segment");
  return root;
}

inline std::vector<double> running_max(const std::vector<double>& a) {
  if (a.empty()) throw std::invalid_argument("running_max: empty trace");
  std::vector<double> b(a.size());
  b[0] = a[0];
  for (std::size_t k = 1; k < a.size(); ++k) b[k] = std::max(b[k - 1], a[k]);
  return b;
}

struct FreeBoundaryTrace {
  std::vector<double> times;
  std::vector<double> a_values;
  std::vector<double> b_values;
};

/// Branch field selected by a boundary trace: H1 on x <= b(t_k), H2 beyond.
inline SpaceTimeField build_v0(const SpaceTimeField& u0, const std::vector<double>& b0, const RelayBranches& branches) {
  if (u0.time_count() != b0.size()) throw std::invalid_argument("build_v0: shape mismatch");
  SpaceTimeField v(u0.grid);
  v.levels.reserve(b0.size());
  for (std::size_t k = 0; k < b0.size(); ++k) {
    std::vector<double> row(u0.grid.size());
    for (std::size_t i = 0; i < row.size(); ++i) {
      const Config c = u0.grid.node(i) <= b0[k] ? Config::one : Config::two;
      row[i] = evaluate_branch(branches, c, u0.levels[k][i]);
    }
    v.push(std::move(row));
  }
  return v;
}

/// Configuration rows matching build_v0's branch selection.
inline ConfigField configs_from_boundary(const Grid& grid, const std::vector<double>& b) {
  ConfigField xi(b.size(), ConfigLevel(grid.size()));
  for (std::size_t k = 0; k < b.size(); ++k) {
    for (std::size_t i = 0; i < grid.size(); ++i) xi[k][i] = grid.node(i) <= b[k] ? Config::one : Config::two;
  }
  return xi;
}

struct HysteresisField {
  SpaceTimeField v;
  ConfigField xi;
  std::vector<RelayState> final_states;
};

/// An independent relay at every node driven by u(x_i, .).
inline HysteresisField distributed_hysteresis(const SpatialConfiguration& xi0, const SpaceTimeField& u,
                                              const std::vector<double>& times, const RelayBranches& branches) {
  if (u.time_count() != times.size() || times.empty()) throw std::invalid_argument("distributed_hysteresis: shape mismatch");
  if (!(u.grid == xi0.grid)) throw std::invalid_argument("distributed_hysteresis: grid mismatch");
  const auto& thr = branches.thresholds;
  if (!consistency_check(u.level(0), xi0, thr).pass) {
    throw std::invalid_argument("distributed_hysteresis: initial configuration inconsistent with u at t=0");
  }
  const std::size_t n = u.grid.size();
  HysteresisField out{SpaceTimeField(u.grid), ConfigField(times.size(), ConfigLevel(n)), {}};
  out.v.levels.assign(times.size(), std::vector<double>(n));
  out.final_states.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RelayState state = make_relay_state(xi0.config[i], times[0], u.levels[0][i], thr);
    out.xi[0][i] = state.config;
    out.v.levels[0][i] = evaluate_branch(branches, state.config, u.levels[0][i]);
    for (std::size_t k = 1; k < times.size(); ++k) {
      step_relay(state, times[k], u.levels[k][i], thr);
      out.xi[k][i] = state.config;
      out.v.levels[k][i] = evaluate_branch(branches, state.config, u.levels[k][i]);
    }
    out.final_states.push_back(state);
  }
  return out;
}

struct TopologyTrace {
  std::vector<std::vector<double>> interfaces;
  std::vector<std::size_t> counts;

  bool preserving() const {
    return std::all_of(counts.begin(), counts.end(), [&](std::size_t c) { return c == counts.front(); });
  }
};

inline TopologyTrace topology_extract(const Grid& grid, const ConfigField& xi) {
  TopologyTrace out;
  for (const auto& row : xi) {
    out.interfaces.push_back(interfaces_of(grid, row));
    out.counts.push_back(out.interfaces.back().size());
  }
  return out;
}

}  // namespace relaypde
