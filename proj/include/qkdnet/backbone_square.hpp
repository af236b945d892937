#pragma once

#include <cstdint>

#include "qkdnet/cost_breakdown.hpp"
#include "qkdnet/link_model.hpp"
#include "qkdnet/planar_chain.hpp"

namespace qkdnet {

/// Regular square grid of backbone nodes with cell side alpha_bb; each user
/// connects to the node at the centre of its cell and trunks follow
/// shortest (Manhattan) grid paths.
struct SquareBackboneScenario {
  PlanarScenario planar;
  double alpha_bb = 1.0;  ///< km

  /// DomainError unless alpha_bb > 0 and L / alpha_bb >= 2.
  void validate() const;
  /// round(L / alpha_bb).
  std::int64_t cells_per_side() const;
};

/// Sum over ordered pairs of cells k, l in {0..n-1}^2 of |k - l|_1, which is
/// (2/3) n^3 (n^2 - 1). RangeError when it does not fit in int64.
std::int64_t manhattan_hop_sum(std::int64_t n);

/// Average of C(|x - centre|) over a square cell of side alpha_bb, by 2-D
/// tensor quadrature. InfeasibleDistance if the cell corners are out of reach.
double square_cell_average_cost(const LinkModel& model, const CostParams& costs, double alpha_bb);

/// Backbone term: V C(alpha_bb) mu^2 / N^4 * manhattan_hop_sum(N) with
/// N = round(L / alpha_bb) when `exact`, otherwise its large-N form
/// (2/3) (C(alpha_bb) / alpha_bb) mu^2 V L. Local term: 2 V mu^2 times the
/// cell-average cost (two access links per pair). Node term: C_node N^2.
CostBreakdown square_backbone_cost(const LinkModel& model, const CostParams& costs,
                                   const SquareBackboneScenario& sc, bool exact);

/// Cell side minimizing C(alpha) / alpha: lambda for PureExponential, a
/// golden-section search over (0, 0.99 * cutoff) for BB84.
double square_optimal_cell(const LinkModel& model, const CostParams& costs);

}  // namespace qkdnet
