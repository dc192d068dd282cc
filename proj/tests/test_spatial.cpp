#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "relaypde/branch_library.hpp"
#include "relaypde/norms.hpp"
#include "relaypde/spatial.hpp"

#include "oracles.hpp"
#include "spatial_oracles.hpp"

using namespace relaypde;
using Catch::Approx;

namespace {

const Thresholds thr01(0.0, 1.0);

RelayBranches step_branches(const Thresholds& thr) {
  return RelayBranches{thr, branches::constant(-1.0), branches::constant(1.0), std::nullopt};
}

}  // namespace

TEST_CASE("configuration construction and interfaces") {
  const Grid g(11);
  const auto xi = SpatialConfiguration::from_interface(g, 0.45);
  CHECK(xi.config[4] == Config::one);
  CHECK(xi.config[5] == Config::two);
  REQUIRE(xi.discontinuities().size() == 1);
  CHECK(xi.discontinuities()[0] == Approx(0.45));

  const auto multi = SpatialConfiguration::from_interfaces(g, Config::two, {0.25, 0.65});
  REQUIRE(multi.discontinuities().size() == 2);
  CHECK(multi.config[0] == Config::two);
  CHECK(multi.config[5] == Config::one);
  CHECK(multi.config[10] == Config::two);
}

TEST_CASE("consistency check") {
  const Grid g(21);
  const Thresholds thr(-1.0, 1.0);
  const auto mid = GridFunction::sample(g, [](double) { return 0.0; });
  CHECK(consistency_check(mid, SpatialConfiguration::from_interface(g, 0.3), thr).pass);
  CHECK(consistency_check(mid, SpatialConfiguration::from_interfaces(g, Config::two, {}), thr).pass);

  const auto at_alpha = GridFunction::sample(g, [&](double) { return thr.alpha; });
  const auto res = consistency_check(at_alpha, SpatialConfiguration::from_interface(g, 0.5), thr);
  CHECK_FALSE(res.pass);
  REQUIRE(res.node);
  CHECK(g.node(*res.node) > 0.5);

  const auto model = GridFunction::sample(g, [](double x) { return -2.0 + 4.0 * x; });
  CHECK(consistency_check(model, SpatialConfiguration::from_interface(g, 0.5), thr).pass);
}

TEST_CASE("transversality check") {
  const Grid g(101);
  const double tol = 10.0 * g.spacing();
  const auto interior = GridFunction::sample(g, [](double) { return 0.5; });
  const auto xi = SpatialConfiguration::from_interface(g, 0.3);
  CHECK(transversality_check(interior, derivative(interior), xi, thr01, tol, tol).transverse);

  // interior minimum on alpha inside the configuration-2 part
  const auto dip = GridFunction::sample(g, [](double x) { return 0.5 * (x - 0.7) * (x - 0.7); });
  const auto v = transversality_check(dip, derivative(dip), xi, thr01, tol, tol);
  CHECK_FALSE(v.transverse);
  CHECK(v.kind == TouchKind::alpha_touch);
  CHECK(v.location > 0.3);

  // steep crossing at the interface is exempt
  const auto ramp = GridFunction::sample(g, [](double x) { return 0.5 * (x - 0.3); });
  CHECK(transversality_check(ramp, derivative(ramp), xi, thr01, 1e-3, 1e-3).transverse);

  // flat top on beta inside the configuration-1 part
  const auto cap = GridFunction::sample(g, [](double x) { return 1.0 - (x - 0.1) * (x - 0.1); });
  const auto c = transversality_check(cap, derivative(cap), xi, thr01, tol, tol);
  CHECK_FALSE(c.transverse);
  CHECK(c.kind == TouchKind::beta_touch);
}

TEST_CASE("E_m classification against the clause oracle") {
  const Grid g(201);
  const auto phi = GridFunction::sample(g, [](double x) { return x - 0.5; });
  const double norm = trace_norm(phi);
  const auto cert = em_classify(phi, derivative(phi), 0.5, norm, thr01, 1000);
  REQUIRE(cert.m);
  for (double margin : cert.margins) CHECK(margin >= 0.0);
  CHECK(spatial_oracle::em_holds(phi, 0.5, norm, thr01, *cert.m));
  if (*cert.m > 1) CHECK_FALSE(spatial_oracle::em_holds(phi, 0.5, norm, thr01, *cert.m - 1));

  const auto none = em_classify(phi, derivative(phi), 0.5 / 1000.0, norm, thr01, 100);
  CHECK_FALSE(none.m);
  CHECK_THROWS(em_classify(phi, derivative(phi), 0.0, norm, thr01, 10));
  CHECK_THROWS(em_classify(phi, derivative(phi), 1.0, norm, thr01, 10));
}

TEST_CASE("E_m classes are nested and agree with the oracle on random data") {
  std::mt19937_64 rng(99);
  const Grid g(121);
  for (int trial = 0; trial < 40; ++trial) {
    const auto inst = spatial_oracle::random_admissible(rng, g, thr01);
    const double norm = trace_norm(inst.phi);
    const auto dphi = derivative(inst.phi);
    const auto cert = em_classify(inst.phi, dphi, inst.b_bar, norm, thr01, 400);
    if (!cert.m) continue;
    for (int m = *cert.m; m < *cert.m + 20; ++m) {
      REQUIRE(em_member(inst.phi, dphi, inst.b_bar, norm, thr01, m));
      REQUIRE(spatial_oracle::em_holds(inst.phi, inst.b_bar, norm, thr01, m));
    }
  }
}

TEST_CASE("alpha-root localization") {
  const Grid g(101);
  const auto lin = GridFunction::sample(g, [](double x) { return x - 0.6; });
  CHECK(find_alpha_root(lin, 0.5, thr01) == Approx(0.6).margin(1e-12));
  const auto high = GridFunction::sample(g, [](double) { return 1.0; });
  CHECK(find_alpha_root(high, 0.5, thr01) == 0.5);
  const auto node_hit = GridFunction::sample(g, [&](double x) { return x - g.node(70); });
  CHECK(find_alpha_root(node_hit, 0.5, thr01) == g.node(70));
  const auto two = GridFunction::sample(g, [](double x) { return (x - 0.6) * (x - 0.8); });
  CHECK_THROWS_AS(find_alpha_root(two, 0.5, thr01), MultipleRoots);
  const auto low = GridFunction::sample(g, [](double) { return -1.0; });
  CHECK_THROWS_AS(find_alpha_root(low, 0.5, thr01), RegimeViolation);
  // b_bar between nodes: the root on the interpolated start point counts
  const auto start = GridFunction::sample(g, [](double x) { return x - 0.505; });
  CHECK(find_alpha_root(start, 0.505, thr01) == Approx(0.505).margin(1e-12));
}

TEST_CASE("root localization bound on tube instances") {
  std::mt19937_64 rng(2024);
  const Grid g(401);
  for (int m = 2; m <= 6; ++m) {
    int checked = 0;
    for (int trial = 0; trial < 20000 && checked < 30; ++trial) {
      const auto inst = spatial_oracle::tube_pair(rng, g, thr01, m);
      if (!inst) continue;
      ++checked;
      const double a1 = find_alpha_root(inst->psi1, inst->b_bar, thr01);
      const double a2 = find_alpha_root(inst->psi2, inst->b_bar, thr01);
      CHECK(std::abs(a1 - a2) <= 2.0 * m * sup_distance(inst->psi1.values, inst->psi2.values) + 1e-12);
    }
    CHECK(checked == 30);
  }
}

TEST_CASE("running max") {
  CHECK(running_max({0.5, 0.4, 0.7, 0.6}) == std::vector<double>{0.5, 0.5, 0.7, 0.7});
  CHECK(running_max({0.1, 0.2, 0.3}) == std::vector<double>{0.1, 0.2, 0.3});
  CHECK_THROWS(running_max({}));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> a1(50), a2(50);
    for (std::size_t k = 0; k < a1.size(); ++k) {
      a1[k] = u(rng);
      a2[k] = a1[k] + 0.1 * (u(rng) - 0.5);
    }
    const auto b1 = running_max(a1);
    const auto b2 = running_max(a2);
    CHECK(b1 == oracle::running_max(a1));
    CHECK(running_max(b1) == b1);
    CHECK(std::is_sorted(b1.begin(), b1.end()));
    CHECK(sup_distance(b1, b2) <= sup_distance(a1, a2) + 1e-12);
    CHECK(oracle::trace_holder(b1, 0.01, 0.3) <= oracle::trace_holder(a1, 0.01, 0.3) + 1e-12);
    // increments bounded by the modulus of a
    for (std::size_t k = 1; k < a1.size(); ++k) {
      double window_max = a1[k - 1];
      for (std::size_t j = k - 1; j <= k; ++j) window_max = std::max(window_max, a1[j]);
      CHECK(b1[k] - b1[k - 1] <= window_max - a1[k - 1] + 1e-15);
    }
  }
}

TEST_CASE("branch field from a boundary trace") {
  const Grid g(11);
  const auto br = step_branches(thr01);
  SpaceTimeField u(g);
  u.push(GridFunction::sample(g, [](double x) { return x; }));
  u.push(GridFunction::sample(g, [](double x) { return x; }));
  const auto all_one = build_v0(u, {1.0, 1.0}, br);
  for (double v : all_one.levels[1]) CHECK(v == -1.0);
  const auto left_closed = build_v0(u, {0.0, 0.0}, br);
  CHECK(left_closed.levels[0][0] == -1.0);
  CHECK(left_closed.levels[0][1] == 1.0);
  const auto half = build_v0(u, {0.5, 0.5}, br);
  CHECK(half.levels[0][5] == -1.0);
  CHECK(half.levels[0][6] == 1.0);
  CHECK_THROWS(build_v0(u, {0.5}, br));
}

TEST_CASE("distributed hysteresis") {
  const Grid g(11);
  const auto br = step_branches(thr01);
  SECTION("no crossings keeps the initial configuration") {
    SpaceTimeField u(g);
    for (int k = 0; k < 3; ++k) u.push(GridFunction::sample(g, [](double) { return 0.5; }));
    const auto xi0 = SpatialConfiguration::from_interface(g, 0.35);
    const auto out = distributed_hysteresis(xi0, u, {0.0, 0.1, 0.2}, br);
    for (const auto& row : out.xi) CHECK(row == xi0.config);
    CHECK(out.v.levels[2][0] == -1.0);
    CHECK(out.v.levels[2][10] == 1.0);
  }
  SECTION("a moving alpha level set switches nodes in order") {
    SpaceTimeField u(g);
    std::vector<double> times;
    for (std::size_t k = 0; k < g.size(); ++k) {
      const double t = g.node(k);
      times.push_back(t);
      u.push(GridFunction::sample(g, [&](double x) { return x - t; }));
    }
    const auto xi0 = SpatialConfiguration::from_interface(g, 0.0);
    const auto out = distributed_hysteresis(xi0, u, times, br);
    for (std::size_t k = 0; k < times.size(); ++k) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        // each node's own relay, run by hand
        auto state = make_relay_state(xi0.config[i], times[0], u.levels[0][i], thr01);
        for (std::size_t j = 1; j <= k; ++j) step_relay(state, times[j], u.levels[j][i], thr01);
        CHECK(out.xi[k][i] == state.config);
        CHECK(out.xi[k][i] == (g.node(i) <= times[k] ? Config::one : Config::two));
      }
    }
    // consistency at every level
    for (std::size_t k = 0; k < times.size(); ++k) {
      CHECK(consistency_check(u.level(k), SpatialConfiguration(g, out.xi[k]), thr01).pass);
    }
  }
  SECTION("inconsistent start is rejected") {
    SpaceTimeField u(g);
    u.push(GridFunction::sample(g, [](double) { return -1.0; }));
    CHECK_THROWS(distributed_hysteresis(SpatialConfiguration::from_interface(g, 0.5), u, {0.0}, br));
  }
}

TEST_CASE("topology extraction") {
  const Grid g(21);
  ConfigField ones(3, ConfigLevel(g.size(), Config::one));
  const auto t0 = topology_extract(g, ones);
  CHECK(t0.counts == std::vector<std::size_t>{0, 0, 0});
  CHECK(t0.preserving());

  ConfigField single{SpatialConfiguration::from_interface(g, 0.5).config};
  const auto t1 = topology_extract(g, single);
  REQUIRE(t1.counts[0] == 1);
  CHECK(std::abs(t1.interfaces[0][0] - 0.5) <= g.spacing());

  // a configuration-1 island shrinking until its two interfaces meet
  ConfigField merging;
  for (double half : {0.2, 0.1, 0.04, 0.0}) {
    merging.push_back(SpatialConfiguration::from_interfaces(g, Config::two, {0.5 - half, 0.5 + half}).config);
  }
  const auto t2 = topology_extract(g, merging);
  CHECK(t2.counts.front() == 2);
  CHECK(t2.counts.back() == 0);
  CHECK_FALSE(t2.preserving());
}

TEST_CASE("small perturbations of E_m data land in E_(m+1)") {
  std::mt19937_64 rng(77);
  const Grid g(121);
  int tried = 0;
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = spatial_oracle::random_admissible(rng, g, thr01);
    const double norm = trace_norm(inst.phi);
    const auto cert = em_classify(inst.phi, derivative(inst.phi), inst.b_bar, norm, thr01, 400);
    if (!cert.m) continue;
    ++tried;
    CHECK(spatial_oracle::shrinking_search(rng, inst, thr01, *cert.m));
  }
  CHECK(tried > 5);
}
