#include <catch_amalgamated.hpp>

#include <cmath>

#include "relaypde/branch_library.hpp"
#include "relaypde/continuation.hpp"
#include "relaypde/direct_march.hpp"
#include "relaypde/dissipation.hpp"
#include "relaypde/fixed_point.hpp"
#include "relaypde/heat.hpp"

#include "oracles.hpp"

using namespace relaypde;
using Catch::Approx;
using oracle::pi;

namespace {

// discrete Neumann Laplacian eigenvalue of cos(k pi x) on a uniform grid
double discrete_eigenvalue(double h, int k) {
  const double s = std::sin(k * pi * h / 2.0);
  return -4.0 * s * s / (h * h);
}

double theta_factor(double lambda, double dt, double theta) {
  return (1.0 + (1.0 - theta) * dt * lambda) / (1.0 - theta * dt * lambda);
}

Problem exchange_problem(double alpha = -0.3, double beta = 0.3, double h2 = 1.0) {
  return Problem{RelayBranches{Thresholds(alpha, beta), branches::constant(-1.0), branches::constant(h2), std::nullopt},
                 make_linear_reaction(1.0)};
}

GridFunction ramp(const Grid& g, double alpha, double amplitude, double b_bar) {
  return GridFunction::sample(g, [&](double x) { return alpha + amplitude * (std::cos(pi * b_bar) - std::cos(pi * x)); });
}

}  // namespace

TEST_CASE("heat step: constants are preserved") {
  const Grid g(51);
  GridFunction u = GridFunction::sample(g, [](double) { return 0.7; });
  for (int k = 0; k < 20; ++k) u = neumann_heat_step(u, GridFunction(g), 1e-3, 0.5);
  for (double v : u.values) CHECK(v == Approx(0.7).margin(1e-14));
}

TEST_CASE("heat step: cosine mode decays by the discrete factor") {
  const Grid g(101);
  const double dt = 1e-3;
  for (double theta : {0.5, 0.75, 1.0}) {
    GridFunction u = GridFunction::sample(g, [](double x) { return std::cos(pi * x); });
    const double factor = theta_factor(discrete_eigenvalue(g.spacing(), 1), dt, theta);
    for (int k = 0; k < 50; ++k) u = neumann_heat_step(u, GridFunction(g), dt, theta);
    const double amp = std::pow(factor, 50);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(u[i] == Approx(amp * std::cos(pi * g.node(i))).margin(1e-12));
  }
}

TEST_CASE("heat step: unit source grows linearly") {
  const Grid g(31);
  GridFunction u(g);
  const auto one = GridFunction::sample(g, [](double) { return 1.0; });
  for (int k = 1; k <= 10; ++k) {
    u = neumann_heat_step(u, one, 0.01, 0.5);
    for (double v : u.values) CHECK(v == Approx(0.01 * k).margin(1e-13));
  }
}

TEST_CASE("heat step conserves the trapezoid mass") {
  const Grid g(81);
  GridFunction u = GridFunction::sample(g, [](double x) { return std::exp(-30.0 * (x - 0.3) * (x - 0.3)) + x; });
  const double mass = trapezoid_mass(u.values, g.spacing());
  for (int k = 0; k < 100; ++k) u = neumann_heat_step(u, GridFunction(g), 5e-4, 0.5);
  CHECK(std::abs(trapezoid_mass(u.values, g.spacing()) - mass) < 1e-12);
}

TEST_CASE("heat step validation") {
  const Grid g(11);
  CHECK_THROWS(neumann_heat_step(GridFunction(g), GridFunction(g), 0.0, 0.5));
  CHECK_THROWS(neumann_heat_step(GridFunction(g), GridFunction(g), 0.1, 0.4));
  CHECK_THROWS(neumann_heat_step(GridFunction(g), GridFunction(Grid(12)), 0.1, 0.5));
}

TEST_CASE("frozen solve: relaxation toward a constant source") {
  const Grid g(21);
  const double dt = 0.01, v = 0.8;
  SpaceTimeField src(g);
  for (int k = 0; k <= 30; ++k) src.push(GridFunction::sample(g, [&](double) { return v; }));
  const auto u = solve_frozen(GridFunction(g), src, make_linear_reaction(1.0), dt, 0.5);
  double expect = 0.0;
  for (std::size_t k = 0; k < u.time_count(); ++k) {
    for (double x : u.levels[k]) CHECK(x == Approx(expect).margin(1e-12));
    expect = (expect * (1.0 - 0.5 * dt) + dt * v) / (1.0 + 0.5 * dt);
  }
  const auto eq = solve_frozen(GridFunction::sample(g, [&](double) { return v; }), src, make_linear_reaction(1.0), dt, 0.5);
  for (double x : eq.levels.back()) CHECK(x == Approx(v).margin(1e-12));
}

TEST_CASE("frozen solve: damped cosine mode") {
  const Grid g(101);
  const double dt = 1e-3;
  SpaceTimeField src(g);
  for (int k = 0; k <= 40; ++k) src.push(GridFunction(g));
  const auto phi = GridFunction::sample(g, [](double x) { return std::cos(pi * x); });
  const auto u = solve_frozen(phi, src, make_linear_reaction(1.0), dt, 0.5);
  const double factor = theta_factor(discrete_eigenvalue(g.spacing(), 1) - 1.0, dt, 0.5);
  const double amp = std::pow(factor, 40);
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(u.levels.back()[i] == Approx(amp * phi[i]).margin(1e-11));
  // against the continuum decay e^{-(pi^2 + 1) t}
  CHECK(amp == Approx(std::exp(-(pi * pi + 1.0) * 0.04)).epsilon(1e-3));
}

TEST_CASE("frozen solve: nonlinear reaction converges in Newton") {
  const Grid g(41);
  ReactionTerm cubic{[](double u, double v) { return -u * u * u + v; }, {}, std::nullopt};
  SpaceTimeField src(g);
  for (int k = 0; k <= 200; ++k) src.push(GridFunction::sample(g, [](double) { return 1.0; }));
  const auto u = solve_frozen(GridFunction(g), src, cubic, 0.05, 1.0);
  for (double x : u.levels.back()) CHECK(x == Approx(1.0).margin(1e-6));
}

TEST_CASE("frozen solve: implicit mask switches the scheme per step") {
  const Grid g(21);
  const double dt = 0.1;
  SpaceTimeField src(g);
  for (int k = 0; k <= 2; ++k) src.push(GridFunction::sample(g, [](double) { return 1.0; }));
  const auto u = solve_frozen(GridFunction(g), src, make_linear_reaction(1.0), dt, 0.5, {true, false});
  const double first = dt / (1.0 + dt);
  CHECK(u.levels[1][3] == Approx(first).margin(1e-14));
  CHECK(u.levels[2][3] == Approx((first * (1.0 - 0.5 * dt) + dt) / (1.0 + 0.5 * dt)).margin(1e-14));
}

TEST_CASE("boundary map: one application from the constant-in-time guess") {
  const Grid g(101);
  const Problem p = exchange_problem();
  const double b_bar = 0.6;
  const auto phi = ramp(g, -0.3, 1.0, b_bar);
  SpaceTimeField u0(g);
  for (int k = 0; k <= 50; ++k) u0.push(phi);
  std::vector<double> b0(51, b_bar);
  const auto out = schauder_map_R(u0, b0, phi, b_bar, p, 1e-4, 0.5);
  CHECK(out.u.time_count() == 51);
  CHECK(out.u.levels[0] == phi.values);
  CHECK(out.a[0] == Approx(b_bar).margin(1e-12));
  CHECK_FALSE(out.topology_index);
  CHECK(std::is_sorted(out.b.begin(), out.b.end()));
  for (std::size_t k = 0; k < out.b.size(); ++k) {
    CHECK(out.b[k] >= out.a[k]);
    CHECK(out.b[k] >= b_bar);
  }
  CHECK(out.b.back() > b_bar);

  // the map is order preserving for h1 < h2: iterates from b_bar increase
  std::vector<double> prev = b0;
  SpaceTimeField u = u0;
  std::vector<double> b = b0;
  for (int it = 0; it < 6; ++it) {
    const auto next = schauder_map_R(u, b, phi, b_bar, p, 1e-4, 0.5);
    for (std::size_t k = 0; k < b.size(); ++k) CHECK(next.b[k] >= prev[k] - 1e-12);
    prev = next.b;
    u = next.u;
    b = next.b;
  }
}

TEST_CASE("fixed point window on transverse data") {
  const Grid g(101);
  const Problem p = exchange_problem();
  const double b_bar = 0.6;
  const auto phi = ramp(g, -0.3, 1.0, b_bar);
  const double norm = trace_norm(phi);
  const auto cert = em_classify(phi, derivative(phi), b_bar, norm, p.branches.thresholds, 1000);
  REQUIRE(cert.m);
  FixedPointOptions opts;
  opts.dt = 1e-4;
  opts.m = *cert.m;
  const auto win = fixed_point_solve(WindowStart::single_interface(phi, b_bar), p, 100, opts);
  CHECK(win.iterations < opts.max_iter);
  CHECK(win.admissible);
  CHECK(win.result.diagnostics.v_mismatch == 0);
  const auto& bv = win.result.boundary.b_values;
  CHECK(std::is_sorted(bv.begin(), bv.end()));
  CHECK(bv.front() == Approx(b_bar).margin(1e-12));
  CHECK(bv.back() <= b_bar + 1.0 / *cert.m);
  CHECK(win.result.termination.kind == TerminationKind::horizon_reached);

  // the relay field reproduces the branch field read off the boundary
  const auto hyst = distributed_hysteresis(SpatialConfiguration::from_interface(g, b_bar), win.result.u,
                                           win.result.times, p.branches);
  for (std::size_t k = 0; k < hyst.v.time_count(); ++k) CHECK(hyst.v.levels[k] == win.result.v.levels[k]);

  CHECK_THROWS_AS(fixed_point_solve(WindowStart::single_interface(phi, b_bar), p, 100,
                                    FixedPointOptions{1e-4, 0.5, 1e-9, 1, INFINITY, std::nullopt}),
                  FixedPointNonConvergence);
}

TEST_CASE("direct march agrees with the fixed point") {
  const Grid g(101);
  const Problem p = exchange_problem();
  const double b_bar = 0.6;
  const auto phi = ramp(g, -0.3, 1.0, b_bar);
  const auto start = WindowStart::single_interface(phi, b_bar);
  FixedPointOptions fo;
  fo.dt = 1e-4;
  const auto fp = fixed_point_solve(start, p, 200, fo);
  const auto dm = direct_march(start, p, 200, DirectOptions{1e-4, 0.5});
  REQUIRE(dm.u.time_count() == fp.result.u.time_count());
  double gap = 0.0;
  for (std::size_t k = 0; k < dm.u.time_count(); ++k) gap = std::max(gap, sup_distance(dm.u.levels[k], fp.result.u.levels[k]));
  CHECK(gap < 1e-2);
  CHECK(dm.termination.kind == TerminationKind::horizon_reached);
  CHECK(std::is_sorted(dm.boundary.b_values.begin(), dm.boundary.b_values.end()));
  for (std::size_t k = 0; k < dm.xi.size(); ++k) {
    CHECK(consistency_check(dm.u.level(k), SpatialConfiguration(g, dm.xi[k]), p.branches.thresholds).pass);
  }
}

TEST_CASE("invariant rectangle") {
  const Problem p = exchange_problem();
  const auto box = invariant_rectangle_bound(p.reaction, p.branches, 0.0);
  // -U + v < 0 and U + v > 0 for v in {-1, 1} exactly when U > 1
  CHECK(box.U > 1.0);
  CHECK(box.U < 1.1 * 1.0 + 1e-9);
  CHECK(box_holds(p.reaction, p.branches, box.U, 401));
  CHECK_FALSE(box_holds(p.reaction, p.branches, 0.99, 401));
  CHECK(box.kind == BoxKind::strict);

  const auto from_hint = invariant_rectangle_bound(p.reaction, p.branches, 3.0);
  CHECK(from_hint.U == Approx(3.03));

  ReactionTerm growth{[](double u, double v) { return u + v; }, {}, std::nullopt};
  CHECK_THROWS_AS(invariant_rectangle_bound(growth, p.branches, 0.0), NoBoxFound);

  // no dissipation at all: the box only exists after regularization
  ReactionTerm pure_source{[](double, double v) { return v; }, {}, std::nullopt};
  CHECK_THROWS_AS(invariant_rectangle_bound(pure_source, p.branches, 0.0), NoBoxFound);
  const auto gen = invariant_rectangle_bound_generalized(pure_source, p.branches, [](double u) { return u; }, 0.5, 0.0);
  CHECK(gen.kind == BoxKind::generalized);
  CHECK(gen.mu == 0.5);
  CHECK(gen.U > 2.0);
  CHECK(gen.U < 2.2 + 1e-9);
}

TEST_CASE("continuation on transverse data reaches the horizon") {
  const Grid g(101);
  const Problem p = exchange_problem();
  const double b_bar = 0.6;
  const auto phi = ramp(g, -0.3, 1.0, b_bar);
  ContinuationOptions opts;
  opts.dt = 1e-4;
  opts.horizon = 0.02;
  opts.box_U = invariant_rectangle_bound(p.reaction, p.branches, sup_norm(phi)).U;
  const auto r = continuation(phi, b_bar, p, opts);
  CHECK(r.termination.kind == TerminationKind::horizon_reached);
  CHECK(r.times.size() == 201);
  CHECK(r.times.back() == Approx(0.02));
  CHECK(std::is_sorted(r.boundary.b_values.begin(), r.boundary.b_values.end()));
  CHECK(r.diagnostics.within_box);
  CHECK(r.diagnostics.v_mismatch == 0);
  CHECK_FALSE(r.diagnostics.windows.empty());
  const auto topo = topology_extract(g, r.xi);
  CHECK(topo.preserving());
  CHECK(topo.counts.front() == 1);
}

TEST_CASE("continuation rejects uncertified data") {
  const Grid g(101);
  const Problem p = exchange_problem();
  // interface too close to the left end for any admissible m
  const auto phi = ramp(g, -0.3, 1.0, 0.0005);
  ContinuationOptions opts;
  opts.m_max = 50;
  opts.horizon = 0.001;
  const auto r = continuation(phi, 0.0005, p, opts);
  CHECK(r.termination.kind == TerminationKind::regime_violation);
  CHECK(r.termination.time == 0.0);
}

TEST_CASE("mu regularization") {
  const Grid g(101);
  const Problem p{RelayBranches{Thresholds(-0.3, 0.3), branches::constant(-1.0), branches::constant(1.0), std::nullopt},
                  ReactionTerm{[](double, double v) { return v; }, [](double, double) { return 0.0; }, 1.0}};
  const auto phi = ramp(g, -0.3, 1.0, 0.6);
  ContinuationOptions opts;
  opts.horizon = 0.005;
  const auto id = [](double u) { return u; };
  const auto one = [](double) { return 1.0; };
  const auto plain = continuation(phi, 0.6, p, opts);
  const auto zero = mu_regularized_solve(phi, 0.6, p, id, one, 0.0, opts);
  REQUIRE(zero.u.time_count() == plain.u.time_count());
  for (std::size_t k = 0; k < zero.u.time_count(); ++k) CHECK(zero.u.levels[k] == plain.u.levels[k]);

  const auto reg = mu_regularized_solve(phi, 0.6, p, id, one, 0.2, opts);
  CHECK(reg.termination.kind == plain.termination.kind);
  double gap = 0.0;
  const std::size_t n = std::min(reg.u.time_count(), plain.u.time_count());
  for (std::size_t k = 0; k < n; ++k) gap = std::max(gap, sup_distance(reg.u.levels[k], plain.u.levels[k]));
  CHECK(gap > 0.0);

  CHECK_THROWS(mu_regularized_solve(phi, 0.6, p, [](double u) { return -u; }, [](double) { return -1.0; }, 0.2, opts));
  CHECK_THROWS(mu_regularized_solve(phi, 0.6, p, id, one, -0.1, opts));
}
