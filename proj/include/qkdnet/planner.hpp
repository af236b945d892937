#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "qkdnet/cost_breakdown.hpp"
#include "qkdnet/link_model.hpp"
#include "qkdnet/planar_chain.hpp"

namespace qkdnet {

enum class Architecture { LinearChains, SquareBackbone, StochasticBackbone };

std::string_view to_string(Architecture a);

/// How the square backbone is costed in a comparison.
enum class ComparisonMode {
  /// Large-grid backbone term plus node term; access links neglected.
  PaperFaithful,
  /// Finite-grid backbone sum plus computed access term plus node term.
  Full,
};

std::string_view to_string(ComparisonMode m);

struct CriticalDensity {
  double sigma_star;  ///< km^-2
  double min_users;   ///< sigma_star * L^2 = sqrt(L / (gamma alpha_bb_opt))
};

/// sigma* = 1 / sqrt(L^3 alpha_bb_opt gamma): below this user density a
/// square backbone never beats per-pair chains.
CriticalDensity critical_density(double alpha_bb_opt, double length_l);

struct ConditionReport {
  bool holds = false;
  double lhs = 0.0;  ///< C_node (sigma^2 / sigma*^2 - 1)
  double rhs = 0.0;  ///< C(alpha_bb_opt) V (sigma^2 / sigma*^2) (2 / (3 gamma) - 1)
  double density_ratio_sq = 0.0;
};

/// Chains and square backbone compared at the same spacing alpha_bb_opt:
/// a necessary condition for the backbone to win at the respective optima.
ConditionReport necessary_condition(const LinkModel& model, const CostParams& costs,
                                    const PlanarScenario& sc, double alpha_bb_opt);

struct Recommendation {
  Architecture chosen = Architecture::LinearChains;
  ComparisonMode mode = ComparisonMode::PaperFaithful;
  std::map<Architecture, CostBreakdown> costs;
  /// Square backbone costed under the other mode, for reference.
  CostBreakdown square_other_mode;
  double ell_opt_km = 0.0;
  double alpha_bb_opt_km = 0.0;
  std::optional<double> alpha_bb_stochastic_km;
  double sigma = 0.0;
  double sigma_star = 0.0;
  double min_users = 0.0;
  bool necessary_condition_holds = false;
  bool full_inequality_holds = false;  ///< chain cost >= square cost at the respective optima
  std::string rationale;
};

struct RecommendOptions {
  ComparisonMode mode = ComparisonMode::PaperFaithful;
  /// Also cost the Poisson-Voronoi backbone at its optimal intensity. It is
  /// reported in `costs` but never affects `chosen`.
  bool include_stochastic = false;
  /// Fixed backbone spacing instead of the optimum, for both backbones.
  std::optional<double> alpha_bb_override;
};

/// Costs per-pair chains at their optimal spacing and the square backbone at
/// its optimal cell, then picks the cheaper. Ties go to chains, which need
/// fewer trusted sites.
Recommendation recommend(const LinkModel& model, const CostParams& costs, const PlanarScenario& sc,
                         const RecommendOptions& options = {});

}  // namespace qkdnet
