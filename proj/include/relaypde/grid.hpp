#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace relaypde {

/// Uniform grid on [0, 1] with both endpoints as nodes.
class Grid {
 public:
  explicit Grid(std::size_t n_points) : n_(n_points) {
    if (n_points < 3) throw std::invalid_argument("Grid: need at least 3 points");
    h_ = 1.0 / static_cast<double>(n_points - 1);
  }

  std::size_t size() const { return n_; }
  double spacing() const { return h_; }
  double node(std::size_t i) const { return static_cast<double>(i) / static_cast<double>(n_ - 1); }

  std::vector<double> nodes() const {
    std::vector<double> x(n_);
    for (std::size_t i = 0; i < n_; ++i) x[i] = node(i);
    return x;
  }

  bool operator==(const Grid& other) const { return n_ == other.n_; }

 private:
  std::size_t n_;
  double h_;
};

struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction(Grid g, std::vector<double> v) : grid(g), values(std::move(v)) {
    if (values.size() != grid.size()) {
      throw std::invalid_argument("GridFunction: " + std::to_string(values.size()) + " values for " +
                                  std::to_string(grid.size()) + " nodes");
    }
  }
  explicit GridFunction(Grid g) : grid(g), values(g.size(), 0.0) {}

  template <typename F>
  static GridFunction sample(Grid g, F&& fn) {
    GridFunction out(g);
    for (std::size_t i = 0; i < g.size(); ++i) out.values[i] = fn(g.node(i));
    return out;
  }

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

inline void require_same_grid(const GridFunction& a, const GridFunction& b, const char* where) {
  if (!(a.grid == b.grid)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

/// Central differences inside, second-order one-sided at the ends.
inline GridFunction derivative(const GridFunction& f) {
  const std::size_t n = f.size();
  const double h = f.grid.spacing();
  GridFunction d(f.grid);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
  d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
  return d;
}

inline GridFunction second_derivative(const GridFunction& f) {
  const std::size_t n = f.size();
  const double h = f.grid.spacing();
  const double h2 = h * h;
  GridFunction d(f.grid);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / h2;
  if (n >= 4) {
    d[0] = (2.0 * f[0] - 5.0 * f[1] + 4.0 * f[2] - f[3]) / h2;
    d[n - 1] = (2.0 * f[n - 1] - 5.0 * f[n - 2] + 4.0 * f[n - 3] - f[n - 4]) / h2;
  } else {
    d[0] = d[1];
    d[n - 1] = d[n - 2];
  }
  return d;
}

/// Time levels of a function on a fixed grid; levels[k][i] = u(x_i, t_k).
struct SpaceTimeField {
  Grid grid;
  std::vector<std::vector<double>> levels;

  explicit SpaceTimeField(Grid g) : grid(g) {}

  std::size_t time_count() const { return levels.size(); }
  GridFunction level(std::size_t k) const { return GridFunction(grid, levels.at(k)); }
  void push(const GridFunction& f) {
    if (!(f.grid == grid)) throw std::invalid_argument("SpaceTimeField: grid mismatch");
    levels.push_back(f.values);
  }
  void push(std::vector<double> v) {
    if (v.size() != grid.size()) throw std::invalid_argument("SpaceTimeField: level length mismatch");
    levels.push_back(std::move(v));
  }
};

/// Zero-slope fix-up at the ends: replaces an endpoint value by the quadratic
/// fit through the next two nodes with vanishing one-sided derivative.
/// Returns the number of endpoints changed.
inline int project_neumann(GridFunction& phi, double slope_tol) {
  const std::size_t n = phi.size();
  const double h = phi.grid.spacing();
  int changed = 0;
  if (std::abs((-3.0 * phi[0] + 4.0 * phi[1] - phi[2]) / (2.0 * h)) > slope_tol) {
    phi[0] = (4.0 * phi[1] - phi[2]) / 3.0;
    ++changed;
  }
  if (std::abs((3.0 * phi[n - 1] - 4.0 * phi[n - 2] + phi[n - 3]) / (2.0 * h)) > slope_tol) {
    phi[n - 1] = (4.0 * phi[n - 2] - phi[n - 3]) / 3.0;
    ++changed;
  }
  return changed;
}

inline double endpoint_slope(const GridFunction& phi) {
  const GridFunction d = derivative(phi);
  return std::max(std::abs(d[0]), std::abs(d[d.size() - 1]));
}

}  // namespace relaypde
