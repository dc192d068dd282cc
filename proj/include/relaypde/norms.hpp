#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "relaypde/grid.hpp"

namespace relaypde {

struct NormParams {
  double q = 4.0;
  double gamma = 0.2;

  void validate() const {
    if (!(q > 3.0)) throw std::invalid_argument("NormParams: q must exceed 3");
    if (!(gamma > 0.0 && gamma < 1.0 - 3.0 / q)) {
      throw std::invalid_argument("NormParams: gamma must lie in (0, 1 - 3/q)");
    }
  }
};

namespace detail {

inline double powq(double x, double q) {
  x = std::abs(x);
  if (q == 4.0) {
    const double x2 = x * x;
    return x2 * x2;
  }
  return std::pow(x, q);
}

inline double trapezoid_weight(std::size_t i, std::size_t n, double h) {
  return (i == 0 || i + 1 == n) ? 0.5 * h : h;
}

inline double lq_power(const std::vector<double>& v, double h, double q) {
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += trapezoid_weight(i, v.size(), h) * powq(v[i], q);
  return acc;
}

}  // namespace detail

inline double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

inline double sup_norm(const GridFunction& f) { return sup_norm(f.values); }

inline double sup_distance(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) throw std::invalid_argument("sup_distance: length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

/// Exact discrete seminorm over all node pairs, O(N^2).
inline double holder_seminorm(const GridFunction& f, double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("holder_seminorm: gamma must lie in (0, 1)");
  const auto& v = f.values;
  const double h = f.grid.spacing();
  double best = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    for (std::size_t j = i + 1; j < v.size(); ++j) {
      const double d = static_cast<double>(j - i) * h;
      best = std::max(best, std::abs(v[i] - v[j]) / std::pow(d, gamma));
    }
  }
  return best;
}

/// Estimator: pairs within `window` nodes of each other, plus every pair
/// involving the global extrema. Never exceeds the exact value.
inline double holder_seminorm_windowed(const GridFunction& f, double gamma, std::size_t window) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw std::invalid_argument("holder_seminorm: gamma must lie in (0, 1)");
  const auto& v = f.values;
  const std::size_t n = v.size();
  const double h = f.grid.spacing();
  double best = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < std::min(n, i + window + 1); ++j) {
      best = std::max(best, std::abs(v[i] - v[j]) / std::pow(static_cast<double>(j - i) * h, gamma));
    }
  }
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  for (auto anchor : {lo, hi}) {
    const std::size_t a = static_cast<std::size_t>(anchor - v.begin());
    for (std::size_t j = 0; j < n; ++j) {
      if (j == a) continue;
      const double d = static_cast<double>(j > a ? j - a : a - j) * h;
      best = std::max(best, std::abs(v[a] - v[j]) / std::pow(d, gamma));
    }
  }
  return best;
}

/// Seminorm of a time trace sampled at strictly increasing, possibly uneven times.
inline double holder_seminorm(const std::vector<double>& times, const std::vector<double>& values, double gamma) {
  if (times.size() != values.size()) throw std::invalid_argument("holder_seminorm: length mismatch");
  double best = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    for (std::size_t j = i + 1; j < values.size(); ++j) {
      best = std::max(best, std::abs(values[i] - values[j]) / std::pow(times[j] - times[i], gamma));
    }
  }
  return best;
}

inline double lq_norm(const GridFunction& f, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("lq_norm: q must be at least 1");
  return std::pow(detail::lq_power(f.values, f.grid.spacing(), q), 1.0 / q);
}

/// Discrete fractional norm of order 2 - 2/q: L_q norms of f and f' plus the
/// Gagliardo double sum of f' with kernel |x - y|^{-(q - 1)}.
inline double trace_norm(const GridFunction& f, const NormParams& params = {}) {
  params.validate();
  const std::size_t n = f.size();
  if (n < 5) throw std::invalid_argument("trace_norm: need at least 5 nodes");
  const double q = params.q;
  const double h = f.grid.spacing();
  const GridFunction df = derivative(f);
  const double kernel_exp = q - 1.0;

  double gagliardo = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double wi = detail::trapezoid_weight(i, n, h);
    double row = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = static_cast<double>(j - i) * h;
      const double kernel = q == 4.0 ? 1.0 / (d * d * d) : std::pow(d, -kernel_exp);
      row += detail::trapezoid_weight(j, n, h) * detail::powq(df[i] - df[j], q) * kernel;
    }
    gagliardo += wi * row;
  }
  gagliardo *= 2.0;  // symmetric pairs

  return lq_norm(f, q) + lq_norm(df, q) + std::pow(gagliardo, 1.0 / q);
}

/// Discrete parabolic Sobolev norm: per level the L_q norms of u, u_x, u_xx,
/// and the L_q norm of the forward time difference; trapezoid in space and time.
inline double wq21_norm(const SpaceTimeField& u, double dt, const NormParams& params = {}) {
  params.validate();
  const std::size_t k_count = u.time_count();
  if (k_count < 3) throw std::invalid_argument("wq21_norm: need at least 3 time levels");
  if (!(dt > 0.0)) throw std::invalid_argument("wq21_norm: dt must be positive");
  const double q = params.q;
  const double h = u.grid.spacing();

  std::vector<double> spatial(k_count), temporal(k_count);
  std::vector<double> diff(u.grid.size());
  for (std::size_t k = 0; k < k_count; ++k) {
    const GridFunction level = u.level(k);
    const double w2 = lq_norm(level, q) + lq_norm(derivative(level), q) + lq_norm(second_derivative(level), q);
    spatial[k] = detail::powq(w2, q);
    const auto& a = k + 1 < k_count ? u.levels[k] : u.levels[k - 1];
    const auto& b = k + 1 < k_count ? u.levels[k + 1] : u.levels[k];
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = (b[i] - a[i]) / dt;
    temporal[k] = detail::lq_power(diff, h, q);
  }
  double total = 0.0;
  for (std::size_t k = 0; k < k_count; ++k) {
    total += detail::trapezoid_weight(k, k_count, dt) * (spatial[k] + temporal[k]);
  }
  return std::pow(total, 1.0 / q);
}

namespace detail {

inline std::vector<std::size_t> subsample(std::size_t n, std::size_t cap) {
  std::vector<std::size_t> idx;
  if (n <= cap) {
    for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
    return idx;
  }
  for (std::size_t k = 0; k < cap; ++k) {
    idx.push_back(static_cast<std::size_t>(std::llround(static_cast<double>(k) * (n - 1) / (cap - 1))));
  }
  idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
  return idx;
}

inline double space_time_holder(const std::vector<std::vector<double>>& w, const std::vector<std::size_t>& ti,
                                const std::vector<std::size_t>& xi, double dt, double h, double gamma) {
  double sup = 0.0;
  double semi = 0.0;
  for (std::size_t a = 0; a < ti.size(); ++a) {
    for (std::size_t b = 0; b < xi.size(); ++b) {
      const double val = w[ti[a]][xi[b]];
      sup = std::max(sup, std::abs(val));
      for (std::size_t c = a; c < ti.size(); ++c) {
        const double dtime = static_cast<double>(ti[c] - ti[a]) * dt;
        for (std::size_t d = (c == a ? b + 1 : 0); d < xi.size(); ++d) {
          const double dx = (static_cast<double>(xi[d]) - static_cast<double>(xi[b])) * h;
          const double dist = std::sqrt(dtime * dtime + dx * dx);
          semi = std::max(semi, std::abs(w[ti[c]][xi[d]] - val) / std::pow(dist, gamma));
        }
      }
    }
  }
  return sup + semi;
}

}  // namespace detail

/// (|u|_{C^gamma} + |u_x|_{C^gamma}) / |u|_{W_q^{2,1}} over the space-time grid,
/// Euclidean distance in (x, t). Large grids are subsampled to about 40 indices
/// per axis.
inline double embedding_ratio(const SpaceTimeField& u, double dt, const NormParams& params = {}) {
  const double denom = wq21_norm(u, dt, params);
  if (denom == 0.0) return 0.0;
  std::vector<std::vector<double>> ux;
  ux.reserve(u.time_count());
  for (std::size_t k = 0; k < u.time_count(); ++k) ux.push_back(derivative(u.level(k)).values);
  const auto ti = detail::subsample(u.time_count(), 40);
  const auto xi = detail::subsample(u.grid.size(), 40);
  const double h = u.grid.spacing();
  const double num = detail::space_time_holder(u.levels, ti, xi, dt, h, params.gamma) +
                     detail::space_time_holder(ux, ti, xi, dt, h, params.gamma);
  return num / denom;
}

}  // namespace relaypde
