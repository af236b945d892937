#pragma once

#include <cstdint>

#include "qkdnet/estimate.hpp"
#include "qkdnet/link_model.hpp"

namespace qkdnet {

/// Users form a homogeneous Poisson process of intensity alpha_u^-2 on an
/// L x L square, and every pair exchanges V bit/s.
struct PlanarScenario {
  double length_l = 1.0;  ///< km
  double alpha_u = 1.0;   ///< km
  double volume_v = 1.0;  ///< bit/s

  void validate() const;
  /// Mean user count (L / alpha_u)^2.
  double mean_users() const { return (length_l / alpha_u) * (length_l / alpha_u); }
  /// User density sigma = alpha_u^-2, km^-2.
  double user_density() const { return 1.0 / (alpha_u * alpha_u); }
};

/// Mean distance between two independent uniform points of the unit square:
/// ln(1 + sqrt 2) / 3 + (2 + sqrt 2) / 15.
double gamma_constant();

/// Expected sum of distances over ordered pairs of distinct users,
/// gamma L^5 / alpha_u^4.
double delta_analytic(const PlanarScenario& sc);

/// Monte-Carlo estimate of the same expectation: each replica draws a
/// Poisson(mu) user count, places users uniformly and sums |U_k - U_l| over
/// ordered pairs k != l. Deterministic for (seed, replicas) at any worker count.
McEstimate delta_monte_carlo(const PlanarScenario& sc, int replicas, std::uint64_t seed,
                             int workers = 0);

/// (V C(l) / l + C_node / l) * delta: every user pair gets its own relay chain.
double planar_chain_total_cost(const LinkModel& model, const CostParams& costs,
                               const PlanarScenario& sc, double ell_km);

}  // namespace qkdnet
