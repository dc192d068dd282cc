#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include "relaypde/relay.hpp"

namespace relaypde::branches {

inline BranchFn constant(double c) {
  return [c](double) { return c; };
}

inline BranchFn linear(double slope, double intercept) {
  return [slope, intercept](double u) { return slope * u + intercept; };
}

inline BranchFn cubic(double c0, double c1, double c2, double c3) {
  return [=](double u) { return c0 + u * (c1 + u * (c2 + u * c3)); };
}

/// scale * sqrt(|threshold - u|) + offset. Singular derivative at the threshold.
inline BranchFn sqrt_singular(double threshold, double scale, double offset) {
  return [=](double u) { return scale * std::sqrt(std::abs(threshold - u)) + offset; };
}

/// Piecewise-linear through (u, H) knots, constant beyond the end knots.
inline BranchFn table(std::vector<std::pair<double, double>> knots) {
  if (knots.size() < 2) throw std::invalid_argument("table branch: need at least two knots");
  std::sort(knots.begin(), knots.end());
  for (std::size_t k = 1; k < knots.size(); ++k) {
    if (!(knots[k].first > knots[k - 1].first)) throw std::invalid_argument("table branch: duplicate knot abscissa");
  }
  return [knots = std::move(knots)](double u) {
    if (u <= knots.front().first) return knots.front().second;
    if (u >= knots.back().first) return knots.back().second;
    auto it = std::upper_bound(knots.begin(), knots.end(), u,
                               [](double value, const std::pair<double, double>& k) { return value < k.first; });
    const auto& hi = *it;
    const auto& lo = *(it - 1);
    const double s = (u - lo.first) / (hi.first - lo.first);
    return lo.second + s * (hi.second - lo.second);
  };
}

}  // namespace relaypde::branches
