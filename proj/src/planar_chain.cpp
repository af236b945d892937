#include "qkdnet/planar_chain.hpp"

#include <cmath>
#include <vector>

#include <fmt/core.h>

#include "qkdnet/detail/parallel.hpp"
#include "qkdnet/errors.hpp"
#include "qkdnet/geometry_sim.hpp"

namespace qkdnet {

void PlanarScenario::validate() const {
  if (!(length_l > 0.0)) throw DomainError(fmt::format("scenario.length_l must be > 0, got {}", length_l));
  if (!(alpha_u > 0.0)) throw DomainError(fmt::format("scenario.alpha_u must be > 0, got {}", alpha_u));
  if (!(volume_v > 0.0)) throw DomainError(fmt::format("scenario.volume_v must be > 0, got {}", volume_v));
}

double gamma_constant() {
  const double root2 = std::sqrt(2.0);
  return std::log(1.0 + root2) / 3.0 + (2.0 + root2) / 15.0;
}

double delta_analytic(const PlanarScenario& sc) {
  sc.validate();
  const double ratio = sc.length_l / sc.alpha_u;
  return gamma_constant() * sc.length_l * ratio * ratio * ratio * ratio;
}

McEstimate delta_monte_carlo(const PlanarScenario& sc, int replicas, std::uint64_t seed,
                             int workers) {
  sc.validate();
  if (replicas < 2) throw DomainError("delta_monte_carlo: need at least 2 replicas");
  std::vector<double> sums(static_cast<std::size_t>(replicas));
  detail::parallel_for(sums.size(), workers, [&](std::size_t r) {
    const PointSet users =
        sample_poisson(sc.user_density(), sc.length_l, detail::derive_seed(seed, 0xde17a, r));
    const auto pts = users.points();
    double sum = 0.0;
    for (std::size_t k = 0; k < pts.size(); ++k) {
      for (std::size_t l = k + 1; l < pts.size(); ++l) {
        sum += std::hypot(pts[k].x - pts[l].x, pts[k].y - pts[l].y);
      }
    }
    sums[r] = 2.0 * sum;  // ordered pairs
  });
  return summarize(sums);
}

double planar_chain_total_cost(const LinkModel& model, const CostParams& costs,
                               const PlanarScenario& sc, double ell_km) {
  if (!(ell_km > 0.0)) throw DomainError(fmt::format("link spacing must be > 0, got {}", ell_km));
  const double per_km = (sc.volume_v * per_bit_cost(model, costs, ell_km) + costs.c_node) / ell_km;
  return per_km * delta_analytic(sc);
}

}  // namespace qkdnet
