#include <doctest.h>

#include <cmath>
#include <vector>

#include "qkdnet/chain.hpp"
#include "qkdnet/errors.hpp"

using namespace qkdnet;

namespace {

const LinkModel kExp{1e6, 19.7, PureExponential{}};

double bisect_x(double k) {
  double lo = 1.0;
  double hi = 1.0 + k + 1.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid - 1.0 - k * std::exp(-mid) > 0 ? hi : lo) = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("chain") {

TEST_CASE("total cost by direct evaluation") {
  const ChainScenario sc{1000.0, 1e6};
  CHECK(chain_total_cost(kExp, {1.0, 0.0}, sc, 19.7) == doctest::Approx(1000.0 * std::exp(1.0) / 19.7));
  CHECK(chain_total_cost(kExp, {1.0, 0.0}, sc, 19.7) == doctest::Approx(138.0).epsilon(1e-3));
  const double ell = 30.0;
  CHECK(chain_total_cost(kExp, {3.0, 0.0}, sc, ell) ==
        doctest::Approx(3.0 * 1000.0 * 1e6 / 1e6 * std::exp(ell / 19.7) / ell));
  CHECK(chain_total_cost(kExp, {3.0, 7.0}, sc, ell) ==
        doctest::Approx(chain_total_cost(kExp, {3.0, 0.0}, sc, ell) + 7.0 * 1000.0 / ell));
}

TEST_CASE("cost is exactly linear in V and L without node cost") {
  const CostParams c{2.0, 0.0};
  const double base = chain_total_cost(kExp, c, {100.0, 1e3}, 25.0);
  CHECK(chain_total_cost(kExp, c, {100.0, 2e3}, 25.0) == 2.0 * base);
  CHECK(chain_total_cost(kExp, c, {200.0, 1e3}, 25.0) == 2.0 * base);
}

TEST_CASE("infeasible spacing") {
  const LinkModel bb{1e6, 19.7, Bb84DarkCount{0.01, 1e-5}};
  CHECK_THROWS_AS(chain_total_cost(bb, {1.0, 0.0}, {100.0, 1.0}, 2.0 * max_distance(bb)),
                  InfeasibleDistance);
  CHECK_THROWS_AS(chain_total_cost(kExp, {1.0, 0.0}, {100.0, 1.0}, 0.0), DomainError);
}

TEST_CASE("optimum without node cost is lambda exactly") {
  const auto opt = chain_optimal_spacing(kExp, {1.0, 0.0}, {500.0, 1e3});
  CHECK(opt.ell_km == kExp.lambda_qkd);
}

TEST_CASE("optimum solves the implicit relation") {
  for (double k : {1e-6, 0.1, 1.0, 5.0, 100.0}) {
    CAPTURE(k);
    // k = (C_node / C_QKD) (R0 / V) with R0 = 1e6, V = 1e6, C_QKD = 1.
    const auto opt = chain_optimal_spacing(kExp, {1.0, k}, {500.0, 1e6});
    const double x = opt.ell_km / kExp.lambda_qkd;
    CHECK(x >= 1.0);
    CHECK(std::abs(x - 1.0 - k * std::exp(-x)) < 1e-10);
    CHECK(x == doctest::Approx(bisect_x(k)).epsilon(1e-11));
  }
  CHECK(chain_optimal_spacing(kExp, {1.0, 1.0}, {500.0, 1e6}).ell_km / kExp.lambda_qkd ==
        doctest::Approx(1.27846).epsilon(1e-5));
  const double tiny = chain_optimal_spacing(kExp, {1.0, 1e-9}, {500.0, 1e6}).ell_km;
  CHECK(tiny > kExp.lambda_qkd);
  CHECK(tiny == doctest::Approx(kExp.lambda_qkd).epsilon(1e-8));
}

TEST_CASE("returned optimum beats a dense grid") {
  const LinkModel bb{1e6, 19.7, Bb84DarkCount{0.01, 1e-5}};
  for (const LinkModel* m : {&kExp, &bb}) {
    for (double c_node : {0.0, 0.5, 20.0}) {
      const CostParams c{1.0, c_node};
      const ChainScenario sc{1000.0, 1e5};
      const auto opt = chain_optimal_spacing(*m, c, sc);
      const double hi = std::min(5.0 * m->lambda_qkd, 0.999 * max_distance(*m));
      double grid_min = INFINITY;
      for (int i = 1; i <= 20000; ++i) {
        grid_min = std::min(grid_min, chain_total_cost(*m, c, sc, hi * i / 20000.0));
      }
      CHECK(grid_min >= opt.cost * (1.0 - 1e-9));
    }
  }
}

TEST_CASE("optimum is monotone in node cost and volume") {
  double previous = 0.0;
  for (double c_node : {0.0, 0.01, 0.1, 1.0, 10.0, 100.0}) {
    const double ell = chain_optimal_spacing(kExp, {1.0, c_node}, {100.0, 1e6}).ell_km;
    CHECK(ell >= previous);
    previous = ell;
  }
  previous = INFINITY;
  for (double v : {1e2, 1e3, 1e4, 1e5, 1e6, 1e7}) {
    const double ell = chain_optimal_spacing(kExp, {1.0, 1.0}, {100.0, v}).ell_km;
    CHECK(ell <= previous);
    previous = ell;
  }
}

TEST_CASE("without node cost the argmin is that of C(l)/l") {
  const LinkModel bb{1e6, 19.7, Bb84DarkCount{0.02, 1e-4}};
  const CostParams c{1.0, 0.0};
  const auto opt = chain_optimal_spacing(bb, c, {100.0, 1e3});
  const double hi = 0.99 * max_distance(bb);
  double best = 0.0;
  double best_v = INFINITY;
  for (int i = 1; i <= 200000; ++i) {
    const double l = hi * i / 200000.0;
    const double v = per_bit_cost(bb, c, l) / l;
    if (v < best_v) {
      best_v = v;
      best = l;
    }
  }
  CHECK(opt.ell_km == doctest::Approx(best).epsilon(1e-4));
  CHECK(opt.ell_km < bb.lambda_qkd);  // the BB84 fraction pulls the optimum inwards
}

TEST_CASE("discretization diagnostic") {
  const auto d = chain_discretization(kExp, {100.0, 1e6}, 19.7);
  CHECK(d.relay_nodes == 5);  // ceil(100 / 19.7) - 1
  CHECK(d.parallel_links == 3);  // ceil(e)
}

TEST_CASE("equal spacing is optimal") {
  const CostParams c{1.0, 0.0};
  // n = 1, total 2 lambda: any split (lambda + d, lambda - d).
  for (double d : {0.0, 1.0, 5.0, 19.0}) {
    const std::vector<double> split{kExp.lambda_qkd + d, kExp.lambda_qkd - d};
    CHECK(partition_cost_margin(kExp, c, split) >= -1e-15);
  }
  // A segment of length zero still has finite cost C_QKD / R0.
  const std::vector<double> degenerate{0.0, 10.0, 30.0};
  CHECK(partition_cost_margin(kExp, c, degenerate) >= 0.0);

  const auto rep = equal_spacing_is_optimal(kExp, c, 5, 100.0, 1000, 42);
  CHECK(rep.pass);
  CHECK(rep.trials == 1000);
  CHECK(rep.worst_margin >= 0.0);
  const LinkModel bb{1e6, 19.7, Bb84DarkCount{0.01, 1e-5}};
  CHECK(equal_spacing_is_optimal(bb, c, 4, 0.8 * max_distance(bb), 1000, 43).pass);
  CHECK_THROWS_AS(equal_spacing_is_optimal(bb, c, 0, 2.0 * max_distance(bb), 10, 1), InfeasibleDistance);
}

}
