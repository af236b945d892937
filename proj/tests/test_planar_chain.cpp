#include <doctest.h>

#include <cmath>

#include "qkdnet/chain.hpp"
#include "qkdnet/errors.hpp"
#include "qkdnet/numerics.hpp"
#include "qkdnet/planar_chain.hpp"

using namespace qkdnet;

TEST_SUITE("planar_chain") {

TEST_CASE("gamma is the mean distance of two uniform points in the unit square") {
  // The coordinate differences have triangular density 2(1 - t) on [0, 1].
  const int n = 1500;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    const double x = (i + 0.5) / n;
    for (int j = 0; j < n; ++j) {
      const double y = (j + 0.5) / n;
      sum += 4.0 * (1.0 - x) * (1.0 - y) * std::hypot(x, y);
    }
  }
  const double oracle = sum / (static_cast<double>(n) * n);
  CHECK(gamma_constant() == doctest::Approx(oracle).epsilon(1e-6));
  CHECK(gamma_constant() == doctest::Approx(0.5214).epsilon(2e-4));
  CHECK(gamma_constant() == std::log(1.0 + std::sqrt(2.0)) / 3.0 + (2.0 + std::sqrt(2.0)) / 15.0);
}

TEST_CASE("delta closed form") {
  CHECK(delta_analytic({10.0, 1.0, 1.0}) == doctest::Approx(0.5214e5).epsilon(1e-4));
  CHECK(delta_analytic({7.0, 7.0, 1.0}) == doctest::Approx(gamma_constant() * 7.0));
  CHECK(delta_analytic({20.0, 1.0, 1.0}) == doctest::Approx(32.0 * delta_analytic({10.0, 1.0, 1.0})));
  // Homogeneous of degree one.
  CHECK(delta_analytic({30.0, 3.0, 1.0}) == doctest::Approx(3.0 * delta_analytic({10.0, 1.0, 1.0})));
}

TEST_CASE("scenario invariants") {
  const PlanarScenario sc{200.0, 5.0, 1e3};
  CHECK(sc.mean_users() == doctest::Approx(1600.0));
  CHECK(sc.user_density() == doctest::Approx(0.04));
  CHECK_THROWS_AS((PlanarScenario{0.0, 1.0, 1.0}).validate(), DomainError);
  CHECK_THROWS_AS((PlanarScenario{1.0, -1.0, 1.0}).validate(), DomainError);
  CHECK_THROWS_AS((PlanarScenario{1.0, 1.0, 0.0}).validate(), DomainError);
}

TEST_CASE("Monte-Carlo delta agrees with the closed form") {
  const PlanarScenario sc{10.0, 1.0, 1.0};
  const auto est = delta_monte_carlo(sc, 2000, 77);
  CHECK(est.batches == 2000);
  CHECK(std::abs(est.z_score(delta_analytic(sc))) <= 3.0);
  CHECK(est.relative_error() <= 0.02);
}

TEST_CASE("Monte-Carlo delta is deterministic and schedule independent") {
  const PlanarScenario sc{8.0, 1.0, 1.0};
  const auto a = delta_monte_carlo(sc, 300, 9, 1);
  const auto b = delta_monte_carlo(sc, 300, 9, 4);
  const auto c = delta_monte_carlo(sc, 300, 9, 1);
  CHECK(a.estimate == b.estimate);
  CHECK(a.std_error == b.std_error);
  CHECK(a.estimate == c.estimate);
  CHECK(delta_monte_carlo(sc, 300, 10, 1).estimate != a.estimate);
  CHECK_THROWS_AS(delta_monte_carlo(sc, 1, 9), DomainError);
}

TEST_CASE("Monte-Carlo coverage over a seed set") {
  // L / alpha_u = 8; the 3-sigma band should hold in nearly every run.
  const PlanarScenario sc{8.0, 1.0, 1.0};
  int inside = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    inside += std::abs(delta_monte_carlo(sc, 400, seed).z_score(delta_analytic(sc))) <= 3.0;
  }
  CHECK(inside >= 29);
}

TEST_CASE("sparse scenarios: replicas with fewer than two users contribute zero") {
  // mu = 0.01: most replicas are empty; the estimate stays finite and non-negative.
  const PlanarScenario sc{1.0, 10.0, 1.0};
  const auto est = delta_monte_carlo(sc, 500, 3);
  CHECK(est.estimate >= 0.0);
  CHECK(std::isfinite(est.std_error));
}

TEST_CASE("planar chain cost") {
  const LinkModel m{1e6, 19.7, PureExponential{}};
  const PlanarScenario sc{100.0, 2.0, 1e3};
  const CostParams c{1e5, 0.0};
  const double expected = sc.volume_v * (1e5 * std::exp(1.0) / (1e6 * 19.7)) * delta_analytic(sc);
  CHECK(planar_chain_total_cost(m, c, sc, 19.7) == doctest::Approx(expected));
  // Ratio to a single chain of length L is delta / L.
  const CostParams cn{1e5, 3e4};
  CHECK(planar_chain_total_cost(m, cn, sc, 30.0) / chain_total_cost(m, cn, {sc.length_l, sc.volume_v}, 30.0) ==
        doctest::Approx(delta_analytic(sc) / sc.length_l));
}

TEST_CASE("planar chain argmin equals the chain argmin") {
  const LinkModel m{1e6, 19.7, Bb84DarkCount{0.01, 1e-5}};
  const CostParams c{1e5, 2e4};
  const PlanarScenario sc{150.0, 3.0, 5e2};
  numerics::Tolerance tol;
  tol.abs = 1e-9 * m.lambda_qkd;
  const double hi = 0.99 * max_distance(m);
  const double planar =
      numerics::minimize_1d([&](double l) { return planar_chain_total_cost(m, c, sc, l); }, 1e-3, hi, tol)
          .argmin;
  const double chain = chain_optimal_spacing(m, c, {sc.length_l, sc.volume_v}).ell_km;
  CHECK(std::abs(planar - chain) <= 1e-6 * m.lambda_qkd);
}

}
