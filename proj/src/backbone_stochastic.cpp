#include "qkdnet/backbone_stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/core.h>

#include "qkdnet/errors.hpp"

namespace qkdnet {

namespace {

using std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

numerics::Tolerance tight(double rel) {
  numerics::Tolerance tol;
  tol.abs = 1e-300;
  tol.rel = rel;
  tol.max_iter = 2000;
  return tol;
}

void require_exponential(const LinkModel& model, const char* what) {
  if (!model.is_exponential()) {
    throw UnsupportedModel(fmt::format("{} needs the pure exponential rate model", what));
  }
}

void require_alpha(double alpha_bb) {
  if (!(alpha_bb > 0.0) || !std::isfinite(alpha_bb)) {
    throw DomainError(fmt::format("alpha_bb must be positive, got {}", alpha_bb));
  }
}

}  // namespace

void StochasticBackboneScenario::validate() const {
  planar.validate();
  require_alpha(alpha_bb);
}

double StochasticBackboneScenario::expected_nodes() const {
  const double ratio = planar.length_l / alpha_bb;
  return ratio * ratio;
}

double kappa_loc(const DistanceCost& cost, double alpha_bb) {
  require_alpha(alpha_bb);
  const double integral = numerics::integrate_1d(
      [&](double u) { return cost(alpha_bb * u) * u * std::exp(-pi * u * u); }, 0.0, kInf,
      tight(1e-12));
  return 4.0 * pi * integral;
}

double kappa_loc(const LinkModel& model, const CostParams& costs, double alpha_bb,
                 std::optional<double> cost_ceiling) {
  model.validate();
  costs.validate();
  if (cost_ceiling && !(*cost_ceiling > 0.0)) throw DomainError("cost ceiling must be positive");
  const double reach = max_distance(model);
  return kappa_loc(
      [&](double d) {
        if (!cost_ceiling) return per_bit_cost(model, costs, d);
        if (!(d < reach)) return *cost_ceiling;
        return std::min(per_bit_cost(model, costs, d), *cost_ceiling);
      },
      alpha_bb);
}

double kappa_bb_closed_form(const LinkModel& model, const CostParams& costs, double alpha_bb) {
  require_exponential(model, "kappa_bb_closed_form");
  require_alpha(alpha_bb);
  const double lambda = model.lambda_qkd;
  const double x = alpha_bb / lambda;
  const double bracket =
      std::exp(x * x / pi) * (1.0 + numerics::erf(x / std::sqrt(pi))) + 1.0 / x;
  return costs.c_qkd / (model.r0 * lambda) * (4.0 / pi) * bracket;
}

double kappa_bb_quadrature(const DistanceCost& cost, double alpha_bb) {
  require_alpha(alpha_bb);
  const auto over_r = [&](double psi, double phi) {
    const double chord = 2.0 * alpha_bb * std::sin(0.5 * (psi - phi));
    const double weight = std::cos(phi) - std::cos(psi);
    if (weight == 0.0) return 0.0;
    return weight * numerics::integrate_1d(
                        [&](double r) { return cost(chord * r) * r * r * std::exp(-pi * r * r); },
                        0.0, kInf, tight(1e-12));
  };
  const auto over_phi = [&](double psi) {
    return numerics::integrate_1d([&](double phi) { return over_r(psi, phi); }, -psi, psi,
                                  tight(1e-11));
  };
  const double triple = numerics::integrate_1d(over_phi, 0.0, pi, tight(1e-10));
  return 2.0 / alpha_bb * triple;
}

double kappa_bb_quadrature(const LinkModel& model, const CostParams& costs, double alpha_bb) {
  model.validate();
  costs.validate();
  return kappa_bb_quadrature([&](double d) { return per_bit_cost(model, costs, d); }, alpha_bb);
}

double kappa_bb_reduced(const LinkModel& model, const CostParams& costs, double alpha_bb) {
  require_exponential(model, "kappa_bb_reduced");
  require_alpha(alpha_bb);
  const double inv_s = alpha_bb / model.lambda_qkd;
  const double inner_outer = numerics::integrate_1d(
      [&](double v) {
        const double sv = std::sin(v);
        return sv * numerics::integrate_1d(
                        [&](double r) { return std::exp(2.0 * inv_s * r * sv - pi * r * r) * r * r; },
                        0.0, kInf, tight(1e-12));
      },
      0.0, 0.5 * pi, tight(1e-11));
  return costs.c_qkd / model.r0 * (2.0 / alpha_bb) * 8.0 * inner_outer;
}

double kappa_bb_single_integral(const LinkModel& model, const CostParams& costs, double alpha_bb) {
  require_exponential(model, "kappa_bb_single_integral");
  require_alpha(alpha_bb);
  const double s = model.lambda_qkd / alpha_bb;
  const double integral = numerics::integrate_1d(
      [&](double v) {
        const double sv = std::sin(v);
        const double q = sv * sv / (pi * s * s);
        return sv * (1.0 + 2.0 * q) * std::exp(q) *
               (1.0 + numerics::erf(sv / (std::sqrt(pi) * s)));
      },
      0.0, 0.5 * pi, tight(1e-12));
  return costs.c_qkd / (model.r0 * model.lambda_qkd) * (2.0 / pi + 4.0 * s / pi * integral);
}

double optimal_alpha_bb(const LinkModel& model, const CostParams& costs) {
  require_exponential(model, "optimal_alpha_bb");
  model.validate();
  costs.validate();
  const double lambda = model.lambda_qkd;
  numerics::Tolerance tol;
  tol.abs = 1e-9 * lambda;
  return numerics::minimize_1d([&](double a) { return kappa_bb_closed_form(model, costs, a); },
                               0.05 * lambda, 10.0 * lambda, tol)
      .argmin;
}

CostBreakdown stochastic_backbone_cost(const LinkModel& model, const CostParams& costs,
                                       const StochasticBackboneScenario& sc) {
  model.validate();
  costs.validate();
  sc.validate();
  const PlanarScenario& p = sc.planar;
  const double mu = p.mean_users();
  const double kb = model.is_exponential() ? kappa_bb_closed_form(model, costs, sc.alpha_bb)
                                           : kappa_bb_quadrature(model, costs, sc.alpha_bb);
  CostBreakdown out;
  out.local = p.volume_v * mu * mu * kappa_loc(model, costs, sc.alpha_bb);
  out.backbone = p.volume_v * delta_analytic(p) * kb;
  out.node = costs.c_node * sc.expected_nodes();
  out.total = out.local + out.backbone + out.node;
  return out;
}

}  // namespace qkdnet
