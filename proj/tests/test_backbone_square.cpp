#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "qkdnet/backbone_square.hpp"
#include "qkdnet/errors.hpp"

using namespace qkdnet;

namespace {

std::int64_t brute(std::int64_t n) {
  std::int64_t total = 0;
  for (std::int64_t a = 0; a < n * n; ++a) {
    for (std::int64_t b = 0; b < n * n; ++b) total += std::abs(a / n - b / n) + std::abs(a % n - b % n);
  }
  return total;
}

const LinkModel kExp{1e6, 19.7, PureExponential{}};

}  // namespace

TEST_SUITE("backbone_square") {

TEST_CASE("Manhattan hop sum against brute force") {
  CHECK(manhattan_hop_sum(1) == 0);
  CHECK(manhattan_hop_sum(2) == 16);
  CHECK(manhattan_hop_sum(3) == 144);
  for (std::int64_t n = 1; n <= 25; ++n) CHECK(manhattan_hop_sum(n) == brute(n));
}

TEST_CASE("Manhattan hop sum range") {
  CHECK_THROWS_AS(manhattan_hop_sum(0), DomainError);
  CHECK_NOTHROW(manhattan_hop_sum(5000));
  CHECK_THROWS_AS(manhattan_hop_sum(100000), RangeError);
  CHECK_THROWS_AS(manhattan_hop_sum(std::int64_t{1} << 40), RangeError);
}

TEST_CASE("cell average cost against a midpoint rule") {
  const CostParams c{2.0, 0.0};
  for (double alpha : {5.0, 19.7, 40.0}) {
    const int n = 800;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double x = (i + 0.5) / n * alpha - 0.5 * alpha;
        const double y = (j + 0.5) / n * alpha - 0.5 * alpha;
        sum += per_bit_cost(kExp, c, std::hypot(x, y));
      }
    }
    CHECK(square_cell_average_cost(kExp, c, alpha) == doctest::Approx(sum / (n * n)).epsilon(1e-6));
  }
  const LinkModel bb{1e6, 19.7, Bb84DarkCount{0.01, 1e-5}};
  CHECK_THROWS_AS(square_cell_average_cost(bb, c, 2.0 * max_distance(bb)), InfeasibleDistance);
}

TEST_CASE("exact and asymptotic terms") {
  const CostParams c{1e5, 5e4};
  const PlanarScenario p{20.0 * 19.7, 5.0, 1e3};
  const SquareBackboneScenario sc{p, 19.7};
  CHECK(sc.cells_per_side() == 20);
  const auto exact = square_backbone_cost(kExp, c, sc, true);
  const auto asym = square_backbone_cost(kExp, c, sc, false);
  const double mu = p.mean_users();
  const double hop = per_bit_cost(kExp, c, 19.7);
  CHECK(exact.backbone ==
        doctest::Approx(p.volume_v * hop * mu * mu / std::pow(20.0, 4) * static_cast<double>(manhattan_hop_sum(20))));
  CHECK(asym.backbone == doctest::Approx((2.0 / 3.0) * hop / 19.7 * mu * mu * p.volume_v * p.length_l));
  // The finite grid sum is (1 - 1/N^2) of the asymptotic one.
  CHECK(exact.backbone / asym.backbone == doctest::Approx(1.0 - 1.0 / 400.0));
  CHECK(exact.node == doctest::Approx(5e4 * 400.0));
  CHECK(asym.node == doctest::Approx(5e4 * 400.0));
  CHECK(exact.local == doctest::Approx(2.0 * p.volume_v * mu * mu * square_cell_average_cost(kExp, c, 19.7)));
  CHECK(exact.total == doctest::Approx(exact.local + exact.backbone + exact.node));
  CHECK(exact.warnings.empty());
}

TEST_CASE("warnings for small or non-integer grids") {
  const CostParams c{1.0, 0.0};
  const auto small = square_backbone_cost(kExp, c, {{5.0 * 19.7, 5.0, 1.0}, 19.7}, true);
  CHECK(small.warnings.size() == 1);
  const auto rounded = square_backbone_cost(kExp, c, {{10.4 * 19.7, 5.0, 1.0}, 19.7}, true);
  CHECK(rounded.warnings.size() == 1);
  CHECK_THROWS_AS(square_backbone_cost(kExp, c, {{19.7, 5.0, 1.0}, 19.7}, true), DomainError);
}

TEST_CASE("backbone dominates local cost on large grids") {
  const CostParams c{1e5, 5e4};
  for (double n : {20.0, 40.0, 80.0}) {
    for (double alpha : {10.0, 19.7, 30.0}) {
      const auto b = square_backbone_cost(kExp, c, {{n * alpha, 3.0, 1e3}, alpha}, true);
      CHECK(b.backbone > b.local);
    }
  }
}

TEST_CASE("optimal cell size") {
  CHECK(square_optimal_cell(kExp, {1.0, 0.0}) == kExp.lambda_qkd);
  const LinkModel bb{1e6, 19.7, Bb84DarkCount{0.02, 1e-4}};
  const double a = square_optimal_cell(bb, {1.0, 0.0});
  double best = INFINITY;
  double arg = 0.0;
  const double hi = 0.99 * max_distance(bb);
  for (int i = 1; i <= 100000; ++i) {
    const double l = hi * i / 100000.0;
    const double v = per_bit_cost(bb, {1.0, 0.0}, l) / l;
    if (v < best) {
      best = v;
      arg = l;
    }
  }
  CHECK(a == doctest::Approx(arg).epsilon(1e-4));
}

}
