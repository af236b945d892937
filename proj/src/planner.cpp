#include "qkdnet/planner.hpp"

#include <cmath>

#include <fmt/core.h>

#include "qkdnet/backbone_square.hpp"
#include "qkdnet/backbone_stochastic.hpp"
#include "qkdnet/chain.hpp"
#include "qkdnet/errors.hpp"

namespace qkdnet {

std::string_view to_string(Architecture a) {
  switch (a) {
    case Architecture::LinearChains: return "LinearChains";
    case Architecture::SquareBackbone: return "SquareBackbone";
    case Architecture::StochasticBackbone: return "StochasticBackbone";
  }
  return "?";
}

std::string_view to_string(ComparisonMode m) {
  return m == ComparisonMode::PaperFaithful ? "paper-faithful" : "full";
}

CriticalDensity critical_density(double alpha_bb_opt, double length_l) {
  if (!(alpha_bb_opt > 0.0) || !(length_l > 0.0)) {
    throw DomainError("critical_density: inputs must be positive");
  }
  const double gamma = gamma_constant();
  return {1.0 / std::sqrt(length_l * length_l * length_l * alpha_bb_opt * gamma),
          std::sqrt(length_l / (gamma * alpha_bb_opt))};
}

ConditionReport necessary_condition(const LinkModel& model, const CostParams& costs,
                                    const PlanarScenario& sc, double alpha_bb_opt) {
  sc.validate();
  const double sigma_star = critical_density(alpha_bb_opt, sc.length_l).sigma_star;
  const double sigma = sc.user_density();
  ConditionReport out;
  out.density_ratio_sq = (sigma / sigma_star) * (sigma / sigma_star);
  out.lhs = costs.c_node * (out.density_ratio_sq - 1.0);
  out.rhs = per_bit_cost(model, costs, alpha_bb_opt) * sc.volume_v * out.density_ratio_sq *
            (2.0 / (3.0 * gamma_constant()) - 1.0);
  out.holds = out.lhs >= out.rhs;
  return out;
}

namespace {

CostBreakdown square_paper_faithful(const LinkModel& model, const CostParams& costs,
                                    const PlanarScenario& sc, double alpha) {
  const double sigma = sc.user_density();
  const double l5 = std::pow(sc.length_l, 5);
  CostBreakdown out;
  out.backbone =
      (2.0 / 3.0) * per_bit_cost(model, costs, alpha) / alpha * sigma * sigma * l5 * sc.volume_v;
  out.node = costs.c_node * (sc.length_l / alpha) * (sc.length_l / alpha);
  out.total = out.backbone + out.node;
  out.warnings.push_back("access-link cost neglected (large-network approximation)");
  return out;
}

}  // namespace

Recommendation recommend(const LinkModel& model, const CostParams& costs, const PlanarScenario& sc,
                         const RecommendOptions& options) {
  model.validate();
  costs.validate();
  sc.validate();

  Recommendation rec;
  const ComparisonMode mode = options.mode;
  rec.mode = mode;
  if (options.alpha_bb_override && !(*options.alpha_bb_override > 0.0)) {
    throw DomainError("recommend: alpha_bb override must be positive");
  }

  const auto spacing = chain_optimal_spacing(model, costs, ChainScenario{sc.length_l, sc.volume_v});
  rec.ell_opt_km = spacing.ell_km;
  const double delta = delta_analytic(sc);
  CostBreakdown chain;
  chain.backbone = sc.volume_v * per_bit_cost(model, costs, spacing.ell_km) / spacing.ell_km * delta;
  chain.node = costs.c_node / spacing.ell_km * delta;
  chain.total = chain.backbone + chain.node;
  rec.costs[Architecture::LinearChains] = chain;

  rec.alpha_bb_opt_km = options.alpha_bb_override ? *options.alpha_bb_override
                                                  : square_optimal_cell(model, costs);
  const double alpha = rec.alpha_bb_opt_km;
  const SquareBackboneScenario square_sc{sc, alpha};
  const bool grid_fits = sc.length_l / alpha >= 2.0;
  if (mode == ComparisonMode::PaperFaithful) {
    rec.costs[Architecture::SquareBackbone] = square_paper_faithful(model, costs, sc, alpha);
    if (grid_fits) rec.square_other_mode = square_backbone_cost(model, costs, square_sc, true);
  } else {
    rec.costs[Architecture::SquareBackbone] = square_backbone_cost(model, costs, square_sc, true);
    rec.square_other_mode = square_paper_faithful(model, costs, sc, alpha);
  }

  if (options.include_stochastic) {
    try {
      const double a =
          options.alpha_bb_override ? *options.alpha_bb_override : optimal_alpha_bb(model, costs);
      rec.costs[Architecture::StochasticBackbone] =
          stochastic_backbone_cost(model, costs, StochasticBackboneScenario{sc, a});
      rec.alpha_bb_stochastic_km = a;
    } catch (const Error& e) {
      // Informational only; the comparison above does not depend on it.
      CostBreakdown unavailable;
      unavailable.total = std::nan("");
      unavailable.warnings.push_back(fmt::format("not evaluated: {}", e.what()));
      rec.costs[Architecture::StochasticBackbone] = unavailable;
    }
  }

  const auto critical = critical_density(alpha, sc.length_l);
  rec.sigma = sc.user_density();
  rec.sigma_star = critical.sigma_star;
  rec.min_users = critical.min_users;
  rec.necessary_condition_holds = necessary_condition(model, costs, sc, alpha).holds;

  const double chain_total = rec.costs[Architecture::LinearChains].total;
  const double square_total = rec.costs[Architecture::SquareBackbone].total;
  rec.full_inequality_holds = chain_total >= square_total;
  if (square_total < chain_total) {
    rec.chosen = Architecture::SquareBackbone;
    rec.rationale = "square backbone is strictly cheaper than per-pair chains";
  } else {
    rec.chosen = Architecture::LinearChains;
    rec.rationale = square_total == chain_total
                        ? "tie; chains preferred as they need fewer trusted sites"
                        : "per-pair chains are cheaper than a square backbone";
  }
  if (rec.sigma <= rec.sigma_star) rec.rationale += " (user density at or below critical density)";
  return rec;
}

}  // namespace qkdnet
