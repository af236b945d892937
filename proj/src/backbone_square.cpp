#include "qkdnet/backbone_square.hpp"

#include <cmath>
#include <limits>

#include <fmt/core.h>

#include "qkdnet/errors.hpp"
#include "qkdnet/numerics.hpp"

namespace qkdnet {

void SquareBackboneScenario::validate() const {
  planar.validate();
  if (!(alpha_bb > 0.0)) throw DomainError(fmt::format("alpha_bb must be > 0, got {}", alpha_bb));
  if (planar.length_l / alpha_bb < 2.0) {
    throw DomainError(fmt::format(
        "square backbone needs at least 2 cells per side (L / alpha_bb = {})",
        planar.length_l / alpha_bb));
  }
}

std::int64_t SquareBackboneScenario::cells_per_side() const {
  return static_cast<std::int64_t>(std::llround(planar.length_l / alpha_bb));
}

std::int64_t manhattan_hop_sum(std::int64_t n) {
  if (n < 1) throw DomainError(fmt::format("manhattan_hop_sum: n must be >= 1, got {}", n));
  if (n > (std::int64_t{1} << 24)) throw RangeError("manhattan_hop_sum: n too large");
  const __int128 m = n;
  // n^3 (n - 1)(n + 1) contains three consecutive integers, so it is divisible by 3.
  const __int128 sum = 2 * m * m * m * (m - 1) * (m + 1) / 3;
  if (sum > std::numeric_limits<std::int64_t>::max()) {
    throw RangeError(fmt::format("manhattan_hop_sum({}) overflows int64", n));
  }
  return static_cast<std::int64_t>(sum);
}

double square_cell_average_cost(const LinkModel& model, const CostParams& costs, double alpha_bb) {
  if (!(alpha_bb > 0.0)) throw DomainError("alpha_bb must be > 0");
  const double half = 0.5 * alpha_bb;
  const double corner = half * std::sqrt(2.0);
  if (!(rate(model, corner) > 0.0)) {
    throw InfeasibleDistance(
        fmt::format("cell corners at {} km are beyond the link's reach", corner), corner);
  }
  numerics::Tolerance tol;
  tol.abs = 1e-14 * per_bit_cost(model, costs, 0.0) * half * half;
  tol.rel = 1e-11;
  const double quadrant = numerics::integrate_1d(
      [&](double x) {
        return numerics::integrate_1d(
            [&](double y) { return per_bit_cost(model, costs, std::hypot(x, y)); }, 0.0, half,
            tol);
      },
      0.0, half, tol);
  return quadrant / (half * half);
}

CostBreakdown square_backbone_cost(const LinkModel& model, const CostParams& costs,
                                   const SquareBackboneScenario& sc, bool exact) {
  model.validate();
  costs.validate();
  sc.validate();
  const PlanarScenario& p = sc.planar;
  const double ratio = p.length_l / sc.alpha_bb;
  const double mu = p.mean_users();
  const double hop_cost = per_bit_cost(model, costs, sc.alpha_bb);

  CostBreakdown out;
  if (ratio < 8.0) {
    out.warnings.push_back(fmt::format(
        "only {:.3g} cells per side; large-grid approximations are coarse", ratio));
  }
  if (exact) {
    const std::int64_t n = sc.cells_per_side();
    if (std::abs(ratio - static_cast<double>(n)) > 0.01) {
      out.warnings.push_back(fmt::format(
          "L / alpha_bb = {:.4g} is not an integer; grid rounded to {} cells per side", ratio, n));
    }
    const double n_d = static_cast<double>(n);
    out.backbone = p.volume_v * hop_cost * mu * mu / (n_d * n_d * n_d * n_d) *
                   static_cast<double>(manhattan_hop_sum(n));
    out.node = costs.c_node * n_d * n_d;
  } else {
    out.backbone = (2.0 / 3.0) * (hop_cost / sc.alpha_bb) * mu * mu * p.volume_v * p.length_l;
    out.node = costs.c_node * ratio * ratio;
  }
  out.local = 2.0 * p.volume_v * mu * mu * square_cell_average_cost(model, costs, sc.alpha_bb);
  out.total = out.local + out.backbone + out.node;
  return out;
}

double square_optimal_cell(const LinkModel& model, const CostParams& costs) {
  model.validate();
  costs.validate();
  if (model.is_exponential()) return model.lambda_qkd;
  const double hi = 0.99 * max_distance(model);
  numerics::Tolerance tol;
  tol.abs = 1e-10 * model.lambda_qkd;
  return numerics::minimize_1d(
             [&](double a) { return per_bit_cost(model, costs, a) / a; }, 1e-9 * hi, hi, tol)
      .argmin;
}

}  // namespace qkdnet
