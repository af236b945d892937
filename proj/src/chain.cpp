#include "qkdnet/chain.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include <fmt/core.h>

#include "qkdnet/errors.hpp"
#include "qkdnet/numerics.hpp"

namespace qkdnet {

namespace {

double cost_or_inf(const LinkModel& model, const CostParams& costs, double ell_km) {
  const double r = rate(model, ell_km);
  return r > 0.0 ? costs.c_qkd / r : std::numeric_limits<double>::infinity();
}

}  // namespace

void ChainScenario::validate() const {
  if (!(length_l > 0.0)) throw DomainError(fmt::format("chain length must be > 0, got {}", length_l));
  if (!(volume_v > 0.0)) throw DomainError(fmt::format("call volume must be > 0, got {}", volume_v));
}

double chain_total_cost(const LinkModel& model, const CostParams& costs, const ChainScenario& sc,
                        double ell_km) {
  if (!(ell_km > 0.0)) throw DomainError(fmt::format("link spacing must be > 0, got {}", ell_km));
  const double segments = sc.length_l / ell_km;
  return segments * sc.volume_v * per_bit_cost(model, costs, ell_km) + segments * costs.c_node;
}

SpacingOptimum chain_optimal_spacing(const LinkModel& model, const CostParams& costs,
                                     const ChainScenario& sc) {
  model.validate();
  costs.validate();
  sc.validate();
  const double lambda = model.lambda_qkd;

  if (model.is_exponential()) {
    const double k = (costs.c_node / costs.c_qkd) * (model.r0 / sc.volume_v);
    double x = 1.0;
    if (k > 0.0) {
      numerics::Tolerance tol;
      tol.abs = 1e-13;
      x = numerics::fixed_point([k](double t) { return 1.0 + k * std::exp(-t); }, 1.0, tol);
    }
    const double ell = lambda * x;
    return {ell, chain_total_cost(model, costs, sc, ell)};
  }

  const double hi = 0.99 * max_distance(model);
  numerics::Tolerance tol;
  tol.abs = 1e-10 * lambda;
  const auto best = numerics::minimize_1d(
      [&](double ell) { return chain_total_cost(model, costs, sc, ell); }, 1e-9 * hi, hi, tol);
  return {best.argmin, best.value};
}

ChainDiscretization chain_discretization(const LinkModel& model, const ChainScenario& sc,
                                         double ell_km) {
  if (!(ell_km > 0.0)) throw DomainError("link spacing must be > 0");
  const double r = rate(model, ell_km);
  if (!(r > 0.0)) throw InfeasibleDistance("zero rate at the chosen spacing", ell_km);
  return {static_cast<std::int64_t>(std::ceil(sc.length_l / ell_km)) - 1,
          static_cast<std::int64_t>(std::ceil(sc.volume_v / r))};
}

double partition_cost_margin(const LinkModel& model, const CostParams& costs,
                             std::span<const double> segments_km) {
  if (segments_km.empty()) throw DomainError("partition needs at least one segment");
  double total = 0.0;
  double sum = 0.0;
  for (const double ell : segments_km) {
    if (!(ell >= 0.0)) throw DomainError("segment lengths must be >= 0");
    total += ell;
    sum += cost_or_inf(model, costs, ell);
  }
  const double parts = static_cast<double>(segments_km.size());
  return sum - parts * cost_or_inf(model, costs, total / parts);
}

EqualSpacingReport equal_spacing_is_optimal(const LinkModel& model, const CostParams& costs,
                                            int n, double total_km, int trials,
                                            std::uint64_t seed) {
  if (n < 0 || trials < 1 || !(total_km > 0.0)) {
    throw DomainError("equal_spacing_is_optimal: need n >= 0, trials >= 1, total > 0");
  }
  const double reference = (n + 1) * cost_or_inf(model, costs, total_km / (n + 1));
  if (std::isinf(reference)) {
    throw InfeasibleDistance("equal split of the total is beyond the zero-rate distance",
                             total_km / (n + 1));
  }
  std::mt19937_64 rng(seed);
  std::exponential_distribution<double> spacing(1.0);
  std::vector<double> parts(static_cast<std::size_t>(n) + 1);

  EqualSpacingReport report;
  report.trials = trials;
  report.worst_margin = std::numeric_limits<double>::infinity();
  for (int t = 0; t < trials; ++t) {
    double norm = 0.0;
    for (double& p : parts) norm += (p = spacing(rng));
    for (double& p : parts) p *= total_km / norm;
    report.worst_margin =
        std::min(report.worst_margin, partition_cost_margin(model, costs, parts) / reference);
  }
  report.pass = report.worst_margin >= -1e-12;
  return report;
}

}  // namespace qkdnet
