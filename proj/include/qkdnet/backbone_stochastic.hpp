#pragma once

#include <functional>
#include <optional>

#include "qkdnet/cost_breakdown.hpp"
#include "qkdnet/link_model.hpp"
#include "qkdnet/numerics.hpp"
#include "qkdnet/planar_chain.hpp"

namespace qkdnet {

/// Backbone nodes form a Poisson process of intensity alpha_bb^-2, cells are
/// their Voronoi cells, and trunk traffic follows the Markov path (the cells
/// crossed by the straight user-to-user segment).
struct StochasticBackboneScenario {
  PlanarScenario planar;
  double alpha_bb = 1.0;  ///< km

  void validate() const;
  /// Mean node count in the domain, (L / alpha_bb)^2.
  double expected_nodes() const;
};

using DistanceCost = std::function<double(double)>;

/// Access cost per secret bit and user pair,
///   4 pi * int_0^inf C(alpha_bb u) u exp(-pi u^2) du  =  2 E[C(|X_0|)],
/// with |X_0| the distance to the nearest node.
double kappa_loc(const DistanceCost& cost, double alpha_bb);

/// Model form. A BB84 link has no rate past its cutoff and C(l) diverges
/// non-integrably on the approach, so a Gaussian tail reaching it raises
/// InfeasibleDistance or NumericalFailure. `cost_ceiling` caps the per-bit
/// cost (and stands in for it past the cutoff), which keeps the mean finite.
double kappa_loc(const LinkModel& model, const CostParams& costs, double alpha_bb,
                 std::optional<double> cost_ceiling = std::nullopt);

/// Closed-form backbone cost per bit and km of user separation for the
/// exponential cost C_QKD / R0 * exp(l / lambda):
///   C_QKD / (R0 lambda) * (4/pi) * [exp(a^2 / (pi lambda^2)) (1 + erf(a / (sqrt(pi) lambda))) + lambda / a]
/// with a = alpha_bb. UnsupportedModel for other variants.
double kappa_bb_closed_form(const LinkModel& model, const CostParams& costs, double alpha_bb);

/// Same quantity for any hop cost, from its defining triple integral over
/// r in R+, 0 < |phi| <= psi < pi:
///   2/alpha_bb * int C(2 alpha_bb r sin((psi - phi)/2)) (cos phi - cos psi) r^2 exp(-pi r^2).
/// Integrates r innermost, then phi, then psi.
double kappa_bb_quadrature(const DistanceCost& cost, double alpha_bb);
double kappa_bb_quadrature(const LinkModel& model, const CostParams& costs, double alpha_bb);

/// Exponential cost only: the double integral
///   2/alpha_bb * C_QKD/R0 * 8 int_0^{pi/2} int_0^inf exp(2 r sin(v) / s - pi r^2) r^2 sin(v) dr dv,
/// s = lambda / alpha_bb.
double kappa_bb_reduced(const LinkModel& model, const CostParams& costs, double alpha_bb);

/// Exponential cost only: the single integral left after the r integration,
///   C_QKD/(R0 lambda) [2/pi + 4s/pi int_0^{pi/2} sin v (1 + 2 sin^2 v/(pi s^2))
///                      exp(sin^2 v/(pi s^2)) (1 + erf(sin v/(sqrt(pi) s))) dv].
double kappa_bb_single_integral(const LinkModel& model, const CostParams& costs, double alpha_bb);

/// alpha_bb minimizing kappa_bb_closed_form over [0.05, 10] * lambda.
/// Scale-free: the result is a fixed multiple of lambda (about 0.80066).
double optimal_alpha_bb(const LinkModel& model, const CostParams& costs);

/// V mu^2 kappa_loc (local) + V delta kappa_bb (backbone) + C_node (L / alpha_bb)^2.
/// mu^2 is taken as (L / alpha_u)^4, not the Poisson second moment mu^2 + mu.
CostBreakdown stochastic_backbone_cost(const LinkModel& model, const CostParams& costs,
                                       const StochasticBackboneScenario& sc);

}  // namespace qkdnet
