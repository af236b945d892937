#pragma once

#include <cstdint>
#include <span>

#include "qkdnet/link_model.hpp"

namespace qkdnet {

/// Two users at distance L exchanging V bit/s of key through a chain of
/// trusted relays. Costs are continuum approximations: the caller is
/// responsible for L >> l and V >> R(l); see chain_discretization for the
/// integer counts a real deployment needs.
struct ChainScenario {
  double length_l = 1.0;  ///< km
  double volume_v = 1.0;  ///< bit/s

  void validate() const;
};

/// C_QKD (L / l) (V / R(l)) + C_node (L / l).
double chain_total_cost(const LinkModel& model, const CostParams& costs, const ChainScenario& sc,
                        double ell_km);

struct SpacingOptimum {
  double ell_km;
  double cost;
};

/// Relay spacing minimizing chain_total_cost.
///
/// For PureExponential the optimum solves x = 1 + k exp(-x) with x = l / lambda
/// and k = (C_node / C_QKD)(R0 / V); k = 0 gives l = lambda exactly. The
/// BB84 variant is minimized directly over (0, 0.99 * cutoff), since the
/// implicit relation only holds in the purely exponential regime.
SpacingOptimum chain_optimal_spacing(const LinkModel& model, const CostParams& costs,
                                     const ChainScenario& sc);

struct ChainDiscretization {
  std::int64_t relay_nodes;     ///< ceil(L / l) - 1
  std::int64_t parallel_links;  ///< ceil(V / R(l)) per segment
};

ChainDiscretization chain_discretization(const LinkModel& model, const ChainScenario& sc,
                                         double ell_km);

/// Sum of per-bit costs over the segments minus the equal-split value
/// (n + 1) C(total / (n + 1)). Segments past the rate cutoff count as +inf.
double partition_cost_margin(const LinkModel& model, const CostParams& costs,
                             std::span<const double> segments_km);

struct EqualSpacingReport {
  bool pass = false;
  double worst_margin = 0.0;  ///< smallest margin seen, relative to the equal-split cost
  int trials = 0;
};

/// Draws `trials` uniform random partitions of `total_km` into n + 1 segments
/// and checks that none beats the equal split.
EqualSpacingReport equal_spacing_is_optimal(const LinkModel& model, const CostParams& costs,
                                            int n, double total_km, int trials,
                                            std::uint64_t seed);

}  // namespace qkdnet
