#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "powerlaw/layers.hpp"

using namespace powerlaw;

namespace {
ModelParams canonical() {
  // tau = 2.5 at N = 10^5 with l = ln ln ln N
  return ModelParams::from_tau(100000, 2.5, 0.8934193065646830);
}
}  // namespace

TEST_CASE("epsilon", "[layers]") {
  CHECK(epsilon_of(ModelParams::from_tau(22026, 2.5, 1.0)) ==
        Catch::Approx(0.10000021147319832).epsilon(1e-12));
  CHECK(epsilon_of(canonical()) ==
        Catch::Approx(0.0776014149733743).epsilon(1e-12));

  ModelParams doubled = ModelParams::from_tau(22026, 2.5, 2.0);
  CHECK(epsilon_of(doubled) ==
        Catch::Approx(2.0 * epsilon_of(ModelParams::from_tau(22026, 2.5, 1.0)))
            .epsilon(1e-15));

  CHECK_THROWS_AS(epsilon_of(ModelParams::from_tau(1, 2.5, 1.0)),
                  std::domain_error);
}

TEST_CASE("beta recursion", "[layers]") {
  ModelParams p = canonical();
  std::vector<double> betas = beta_sequence(p, 4);
  REQUIRE(betas.size() == 5);
  CHECK(betas[0] == Catch::Approx(0.8218694966134152).epsilon(1e-12));
  CHECK(betas[1] == Catch::Approx(0.4885361632800819).epsilon(1e-12));

  double eps = epsilon_of(p);
  CHECK(betas[0] == Catch::Approx(1.0 / (p.tau - 1.0) + eps / (p.tau - 2.0))
                        .margin(1e-12));
  for (std::size_t j = 1; j < betas.size(); ++j)
    CHECK(betas[j] ==
          Catch::Approx((p.tau - 2.0) * betas[j - 1] + eps).margin(1e-12));

  // strictly decreasing while above the fixed point eps/(3-tau)
  double fixed_point = eps / (3.0 - p.tau);
  for (std::size_t j = 1; j < betas.size(); ++j)
    if (betas[j - 1] > fixed_point) CHECK(betas[j] < betas[j - 1]);

  // degenerate eps = 0 collapses the recursion to alpha (tau-2)^j
  std::vector<double> pure = beta_sequence_eps(2.5, 0.0, 3);
  for (std::size_t j = 0; j < pure.size(); ++j)
    CHECK(pure[j] == Catch::Approx((2.0 / 3.0) * std::pow(0.5, j)).epsilon(1e-14));

  CHECK_THROWS_AS(beta_sequence_eps(2.5, 0.1, -1), std::domain_error);
}

TEST_CASE("hierarchy height", "[layers]") {
  CHECK(loglog_ratio(100000, 2.5) ==
        Catch::Approx(3.5251825675870841).epsilon(1e-12));
  CHECK(k_star(100000, 2.5) == 4);
  CHECK(k_star(1000, 2.5) == 3);
  CHECK(k_star(10000, 2.5) == 4);

  int prev = 0;
  for (std::int64_t n = 16; n <= 4096; n *= 2) {
    int k = k_star(n, 2.5);
    CHECK(k >= prev);
    prev = k;
  }
  CHECK_THROWS_AS(k_star(15, 2.5), std::domain_error);
}

TEST_CASE("layer structure at the canonical point", "[layers]") {
  ModelParams p = canonical();
  LayerStructure ls = build_layers(p);
  CHECK(ls.k_star == 4);
  CHECK(ls.depth() == 4);

  CHECK(ls.cardinalities[0] == 1);
  CHECK(ls.cardinalities[1] == 21);
  CHECK(ls.cardinalities[2] == 385);
  CHECK(ls.cardinalities[3] == 1625);
  CHECK(ls.cardinalities[4] == 3337);
  for (int j = 0; j <= 4; ++j) {
    CHECK(ls.cardinalities[j] == ls.cardinalities_closed[j]);
    CHECK(ls.count_mismatch[j] == 0);
    CHECK_FALSE(ls.empty_layer[j]);
  }
  CHECK_FALSE(ls.any_count_mismatch);

  CHECK(ls.thresholds[1] == Catch::Approx(277.12826090738986).epsilon(1e-12));
  CHECK(ls.volumes[0] == Catch::Approx(2154.4346900318837).epsilon(1e-12));
  CHECK(ls.volumes[1] == Catch::Approx(12699.386297014888).epsilon(1e-10));
  CHECK(ls.volume_lower_bounds[0] ==
        Catch::Approx(2154.4346900318837).epsilon(1e-12));
  CHECK(ls.volume_lower_bounds[1] ==
        Catch::Approx(5729.898847104941).epsilon(1e-10));

  for (int j = 0; j <= 4; ++j) {
    // every thresholded member meets the cut, so the volume dominates; the
    // base layer is {1} by definition and sits below its nominal threshold
    if (j > 0) {
      CHECK(ls.volumes[j] >=
            ls.thresholds[j] * static_cast<double>(ls.cardinalities[j]) *
                (1.0 - 1e-12));
      CHECK(ls.cardinalities[j] >= ls.cardinalities[j - 1]);
    }
    if (ls.volume_lower_bounds[j] > 0.0)
      CHECK(ls.volumes[j] >= ls.volume_lower_bounds[j]);
  }

  // membership is a prefix property
  CHECK(ls.member(1, 0));
  CHECK_FALSE(ls.member(2, 0));
  CHECK(ls.member(21, 1));
  CHECK_FALSE(ls.member(22, 1));
  CHECK(ls.smallest_layer(1) == 0);
  CHECK(ls.smallest_layer(22) == 2);
  CHECK(ls.smallest_layer(100000) == 5);  // below every built layer
}

TEST_CASE("empty layers are flagged, not fatal", "[layers]") {
  // l large enough that beta_1 > alpha: U_1 empty by closed form
  ModelParams p = ModelParams::from_tau(100000, 2.5, 1.957);
  LayerStructure ls = build_layers(p, 2);
  CHECK(ls.cardinalities[0] == 1);
  CHECK(ls.cardinalities[1] == 0);
  CHECK(ls.empty_layer[1]);
  CHECK(ls.volumes[1] == 0.0);
}

TEST_CASE("total capacity is cached exactly", "[layers]") {
  ModelParams p = ModelParams::from_tau(5000, 2.5, 0.7);
  LayerStructure ls = build_layers(p);
  CHECK(ls.total_capacity == Catch::Approx(total_capacity(p)).epsilon(1e-12));
}

TEST_CASE("deeper builds extend the same prefix", "[layers]") {
  ModelParams p = canonical();
  LayerStructure base = build_layers(p, 2);
  LayerStructure deep = build_layers(p, 6);
  for (int j = 0; j <= 2; ++j) {
    CHECK(base.betas[j] == deep.betas[j]);
    CHECK(base.cardinalities[j] == deep.cardinalities[j]);
    CHECK(base.volumes[j] == deep.volumes[j]);
  }
  CHECK(deep.depth() == 6);
}
