#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "powerlaw/bounds.hpp"

using namespace powerlaw;

namespace {
ModelParams canonical() {
  return ModelParams::from_tau(100000, 2.5, 0.8934193065646830);
}

// the formula exactly as written, no log-space tricks
double s_direct(std::int64_t n, double tau, int x, double l) {
  double m = std::exp((3.0 - tau) * l);
  return std::pow(static_cast<double>(n),
                  1.0 - std::pow(tau - 2.0, x + 1) / (tau - 1.0)) *
         std::pow(1.0 - std::exp(-m), x) *
         std::pow(m, -(tau - 2.0) / (3.0 - tau));
}
}  // namespace

TEST_CASE("p_zero", "[bounds]") {
  ModelParams p = ModelParams::from_tau(100000, 2.5, 2.0);
  CHECK(p_zero(p) == Catch::Approx(0.9340119641546875).epsilon(1e-14));
  CHECK(p_zero(p, BoundConfig{0.0}) == 0.0);

  double prev = 0.0;
  for (double l : {0.5, 1.0, 1.5, 2.0, 3.0}) {
    double v = p_zero(ModelParams::from_tau(100000, 2.5, l));
    CHECK(v > prev);
    prev = v;
  }
  CHECK(p_zero(p, BoundConfig{2.0}) > p_zero(p, BoundConfig{1.0}));
  CHECK(p_zero(canonical()) == Catch::Approx(0.7905269892541951).epsilon(1e-14));
}

TEST_CASE("per-layer uplink bounds", "[bounds]") {
  LayerStructure ls = build_layers(canonical());
  LayerLinkBound b1 = layer_link_bound(ls, 1);
  CHECK(b1.exact == Catch::Approx(0.8681099550395006).epsilon(1e-12));
  CHECK(b1.simplified == Catch::Approx(0.9131411036193496).epsilon(1e-12));
  CHECK_FALSE(b1.empty_previous);
  CHECK(layer_link_bound(ls, 2).exact ==
        Catch::Approx(0.8266961488443075).epsilon(1e-12));
  CHECK(layer_link_bound(ls, 3).exact ==
        Catch::Approx(0.890128823662443).epsilon(1e-12));
  CHECK(layer_link_bound(ls, 4).exact ==
        Catch::Approx(0.9011959597595306).epsilon(1e-12));

  for (int j = 1; j <= 4; ++j) {
    LayerLinkBound b = layer_link_bound(ls, j);
    CHECK(b.exact > 0.0);
    CHECK(b.exact < 1.0);
    // the exact form dominates the simplified one iff its exponent does
    double exact_arg = ls.thresholds[j] * ls.volumes[j - 1] / ls.total_capacity;
    if (exact_arg >= std::exp(ls.params.l_value))
      CHECK(b.exact >= b.simplified);
  }
  CHECK_THROWS_AS(layer_link_bound(ls, 0), std::domain_error);
  CHECK_THROWS_AS(layer_link_bound(ls, 5), std::domain_error);
}

TEST_CASE("uplink bound with an empty feeding layer", "[bounds]") {
  ModelParams p = ModelParams::from_tau(100000, 2.5, 1.957);  // U_1 empty
  LayerStructure ls = build_layers(p, 2);
  REQUIRE(ls.cardinalities[1] == 0);
  LayerLinkBound b2 = layer_link_bound(ls, 2);
  CHECK(b2.exact == 0.0);
  CHECK(b2.empty_previous);
  CHECK(p_layer_bound(ls, 2) == 0.0);
}

TEST_CASE("simplified uplink bound is monotone in l", "[bounds]") {
  double prev = 0.0;
  for (double l : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    LayerStructure ls = build_layers(ModelParams::from_tau(10000, 2.5, l), 1);
    double v = layer_link_bound(ls, 1).simplified;
    CHECK(v > prev);
    prev = v;
  }
}

TEST_CASE("objective value and log-space agreement", "[bounds]") {
  CHECK(s_objective(100000, 2.5, 4, 2.0) ==
        Catch::Approx(22026.65800134301).epsilon(1e-12));
  CHECK(s_objective(100000, 2.5, 0, 2.0) ==
        Catch::Approx(792.5722298092996).epsilon(1e-12));

  for (std::int64_t n : {std::int64_t{1000}, std::int64_t{100000}})
    for (double tau : {2.2, 2.5, 2.8})
      for (int x : {0, 1, 3, 7})
        for (double l : {0.1, 0.9, 2.0, 6.0}) {
          double direct = s_direct(n, tau, x, l);
          CHECK(s_objective(n, tau, x, l) ==
                Catch::Approx(direct).epsilon(1e-9));
          CHECK(s_objective(n, tau, x, l) > 0.0);
        }

  CHECK_THROWS_AS(s_objective(100000, 2.5, -1, 2.0), std::domain_error);
  CHECK_THROWS_AS(s_objective(100000, 2.5, 1, 0.0), std::domain_error);
}

TEST_CASE("stationary point kills the x derivative", "[bounds]") {
  constexpr double h = 1e-4;
  for (std::int64_t n : {std::int64_t{1000}, std::int64_t{100000},
                         std::int64_t{10000000}})
    for (double tau : {2.3, 2.5, 2.7})
      for (double m : {1.2, 1.6, 2.5, 4.0}) {
        auto sx = stationary_x(n, tau, m);
        REQUIRE(sx.has_value());
        double l = std::log(m) / (3.0 - tau);
        double deriv = (log_s_objective(n, tau, *sx + h, l) -
                        log_s_objective(n, tau, *sx - h, l)) /
                       (2.0 * h);
        CHECK(std::fabs(deriv) < 1e-5);
      }

  // larger m -> smaller correction term -> larger stationary x
  double prev = -1e9;
  for (double m : {1.1, 1.5, 2.0, 3.0, 5.0}) {
    double v = *stationary_x(100000, 2.5, m);
    CHECK(v > prev);
    prev = v;
  }

  // m so large that 1 - e^{-m} rounds to 1: no interior stationary point
  CHECK_FALSE(stationary_x(100000, 2.5, 800.0).has_value());
  CHECK_THROWS_AS(stationary_x(100000, 2.5, 0.0), std::domain_error);
  CHECK_THROWS_AS(stationary_x(15, 2.5, 1.5), std::domain_error);
}

TEST_CASE("l grid", "[bounds]") {
  GridSpec g;
  std::vector<double> ls = l_grid_points(g);
  REQUIRE(ls.size() == 200);
  CHECK(ls.front() == 0.1);
  CHECK(ls.back() == 10.0);
  // log-spaced: constant ratio
  double ratio = ls[1] / ls[0];
  for (std::size_t i = 2; i < ls.size(); ++i)
    CHECK(ls[i] / ls[i - 1] == Catch::Approx(ratio).epsilon(1e-9));

  GridSpec one{1, 1, 0.7, 0.7, 1};
  CHECK(l_grid_points(one) == std::vector<double>{0.7});

  GridSpec bad;
  bad.l_min = 0.0;
  CHECK_THROWS_AS(l_grid_points(bad), std::domain_error);
}

TEST_CASE("optimizer at N = 10^5", "[bounds]") {
  std::vector<SurfacePoint> surface;
  Optimum opt = optimize(100000, 2.5, {}, &surface);
  CHECK(opt.x_star == 5);
  CHECK(opt.l_star == Catch::Approx(1.9569517).margin(1e-4));
  CHECK(opt.s_value / 1e5 == Catch::Approx(0.2320438).margin(1e-5));
  CHECK_FALSE(opt.on_boundary);
  CHECK(opt.stationary_consistent);
  REQUIRE(opt.stationary_x_real.has_value());
  CHECK(*opt.stationary_x_real == Catch::Approx(5.1976).margin(1e-3));

  REQUIRE(surface.size() == 200 * 12);  // x in 1..3k*, 200 l points
  for (const SurfacePoint& sp : surface) CHECK(opt.s_value >= sp.s);

  // integer-neighbor optimality at the refined l
  CHECK(opt.s_value >= s_objective(100000, 2.5, 4, opt.l_star));
  CHECK(opt.s_value >= s_objective(100000, 2.5, 6, opt.l_star));
}

TEST_CASE("optimizer boundary flag and degenerate grid", "[bounds]") {
  // at N = 100 the best l sits on the lower grid edge
  Optimum small = optimize(100, 2.5);
  CHECK(small.x_star == 1);
  CHECK(small.on_boundary);

  GridSpec point{2, 2, 0.7, 0.7, 1};
  Optimum degenerate = optimize(100000, 2.5, point);
  CHECK(degenerate.x_star == 2);
  CHECK(degenerate.l_star == 0.7);
  CHECK(degenerate.s_value == Catch::Approx(s_objective(100000, 2.5, 2, 0.7)));
}

TEST_CASE("asymptotic density", "[bounds]") {
  CHECK(asymptotic_density(2.5, 0.0) == 1.0);
  CHECK(asymptotic_density(2.5, 0.8934193065646830) ==
        Catch::Approx(0.6397296247091408).epsilon(1e-14));
  CHECK_THROWS_AS(asymptotic_density(2.5, -0.1), std::domain_error);
}

TEST_CASE("expected core counts at the canonical point", "[bounds]") {
  LayerStructure ls = build_layers(canonical());
  CoreCountBounds c = expected_core_counts(ls, 4);
  CHECK(c.p0 == Catch::Approx(0.7905269892541951).epsilon(1e-13));
  CHECK(c.u_prime_size == Catch::Approx(1303.2358356490704).epsilon(1e-12));
  CHECK(c.u_prime_volume == Catch::Approx(12571.01939741276).epsilon(1e-11));
  CHECK(c.neighborhood_size == Catch::Approx(2132.652351194349).epsilon(1e-11));
  CHECK(c.volume_ratio == Catch::Approx(0.04265304702388698).epsilon(1e-11));
  CHECK(c.half_linearization_valid);
  CHECK_FALSE(c.empty_core_layer);

  CHECK_THROWS_AS(expected_core_counts(ls, 0), std::domain_error);
  CHECK_THROWS_AS(expected_core_counts(ls, 5), std::domain_error);
}

TEST_CASE("core counts degenerate cases", "[bounds]") {
  LayerStructure ls = build_layers(canonical());
  // c_ratio large enough that p0 rounds to exactly 1
  CoreCountBounds full = expected_core_counts(ls, 1, BoundConfig{1000.0});
  CHECK(full.p0 == 1.0);
  CHECK(full.u_prime_size == 21.0);

  // p0 = 0.9 by choosing c_ratio = ln(10) / m
  double m = std::exp(0.5 * 0.8934193065646830);
  CoreCountBounds nine =
      expected_core_counts(ls, 1, BoundConfig{std::log(10.0) / m});
  CHECK(nine.p0 == Catch::Approx(0.9).epsilon(1e-12));
  CHECK(nine.u_prime_size == Catch::Approx(18.9).epsilon(1e-12));
}

TEST_CASE("simplified neighborhood bound sits in the claimed density band",
          "[bounds]") {
  Optimum opt = optimize(100000, 2.5);
  ModelParams at_opt = ModelParams::from_tau(100000, 2.5, opt.l_star);
  LayerStructure ls = build_layers(at_opt, std::max(k_star(at_opt), opt.x_star));
  CoreCountBounds c = expected_core_counts(ls, opt.x_star);
  double density = c.neighborhood_simplified / 1e5;
  CHECK(density >= 0.10);
  CHECK(density <= 0.35);
  // the optimized l empties the shallow layers, which is flagged not hidden
  CHECK(ls.empty_layer[1]);
}

TEST_CASE("half-linearization constant", "[bounds]") {
  double v = kHalfLinearizationLimit;
  CHECK(1.0 - std::exp(-v) == Catch::Approx(v / 2.0).epsilon(1e-14));
}

TEST_CASE("bound report", "[bounds]") {
  BoundReport r = make_bound_report(canonical());
  CHECK(r.layers.k_star == 4);
  CHECK(r.p0 == Catch::Approx(0.7905269892541951).epsilon(1e-13));
  CHECK(r.optimum.x_star == 5);
  CHECK(r.core_x == 5);
  CHECK(r.s_max == Catch::Approx(23204.0).epsilon(1e-3));
  CHECK(r.density == Catch::Approx(0.232).margin(5e-3));
  CHECK(r.density >= 0.0);
  CHECK(r.density <= 1.0);
  CHECK(r.asymptotic_density ==
        Catch::Approx(0.6397296247091408).epsilon(1e-12));
  REQUIRE(r.p_layer.size() == 5);  // depth max(k*, x*) = 5
  for (const LayerLinkBound& b : r.p_layer) {
    CHECK(b.exact >= 0.0);
    CHECK(b.exact <= 1.0);
    CHECK(b.simplified >= 0.0);
    CHECK(b.simplified <= 1.0);
  }
  for (const SurfacePoint& sp : r.s_surface) CHECK(r.s_max >= sp.s);

  BoundReport fixed_x = make_bound_report(canonical(), {}, {}, 2);
  CHECK(fixed_x.core_x == 2);
  CHECK(fixed_x.core.u_prime_size ==
        Catch::Approx(std::pow(fixed_x.p0, 2) * 385.0).epsilon(1e-12));
}

TEST_CASE("scaling series", "[bounds]") {
  std::vector<std::int64_t> ns;
  for (std::int64_t n = 100; n <= 10000000000LL; n *= 10) ns.push_back(n);
  std::vector<ScalingRow> rows = scaling_series(2.5, ns);
  REQUIRE(rows.size() == 9);

  CHECK(rows[0].x_star == 1);
  CHECK_FALSE(rows[0].ordering_ok);  // x* = 1 < loglog ratio at N = 100
  CHECK(rows[0].lll == Catch::Approx(0.4234226524603038).epsilon(1e-12));
  CHECK(rows[0].llll == Catch::Approx(-0.8593844203891731).epsilon(1e-12));

  CHECK(rows[3].n == 100000);
  CHECK(rows[3].x_star == 5);
  CHECK(rows[3].loglog_ratio == Catch::Approx(3.5251825675870841).epsilon(1e-12));

  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].ordering_ok);
    CHECK(static_cast<double>(rows[i].x_star) >= rows[i].loglog_ratio);
    CHECK(rows[i].loglog_ratio >= rows[i].l_star);
    CHECK(rows[i].l_star >= rows[i].lll);
    CHECK(rows[i].lll >= rows[i].llll);
  }
}

TEST_CASE("objective curve has an interior maximum", "[bounds]") {
  GridSpec grid;
  Optimum opt = optimize(100000, 2.5, grid);
  std::vector<CurvePoint> curve = objective_curve(100000, 2.5, opt.x_star, grid);
  REQUIRE(curve.size() == 200);
  std::size_t argmax = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].s > 0.0);
    if (curve[i].s > curve[argmax].s) argmax = i;
  }
  CHECK(argmax > 0);
  CHECK(argmax + 1 < curve.size());
  // grid argmax within one grid step of the refined l*
  double step = curve[argmax + 1].l - curve[argmax].l;
  CHECK(std::fabs(curve[argmax].l - opt.l_star) <= step);
}
