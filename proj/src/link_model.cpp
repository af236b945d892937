#include "qkdnet/link_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <fmt/core.h>

#include "qkdnet/errors.hpp"

namespace qkdnet {

namespace {

// Root of 1 - 2 h(p) on (0, 1/2), by bisection once at first use.
double solve_entropy_cutoff() {
  double lo = 0.01;
  double hi = 0.49;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (1.0 - 2.0 * binary_entropy(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double secret_fraction(const Bb84DarkCount& bb, double x) {
  const double p = bb.a + bb.b * std::exp(x);
  if (!(p < bb84_error_cutoff())) return 0.0;
  return std::max(0.0, 1.0 - 2.0 * binary_entropy(p));
}

}  // namespace

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

double bb84_error_cutoff() {
  static const double cutoff = solve_entropy_cutoff();
  return cutoff;
}

void LinkModel::validate() const {
  if (!(r0 > 0.0) || !std::isfinite(r0)) {
    throw DomainError(fmt::format("link.r0 must be positive, got {}", r0));
  }
  if (!(lambda_qkd > 0.0) || !std::isfinite(lambda_qkd)) {
    throw DomainError(fmt::format("link.lambda_qkd must be positive, got {}", lambda_qkd));
  }
  if (const auto* bb = std::get_if<Bb84DarkCount>(&variant)) {
    if (!(bb->a >= 0.0)) throw DomainError(fmt::format("link.bb84_a must be >= 0, got {}", bb->a));
    if (!(bb->b > 0.0)) throw DomainError(fmt::format("link.bb84_b must be > 0, got {}", bb->b));
    if (!(bb->a + bb->b < bb84_error_cutoff())) {
      throw DomainError(fmt::format(
          "link.bb84_a + link.bb84_b must be below the entropy cutoff {:.6f} (rate at zero distance "
          "would vanish), got {}",
          bb84_error_cutoff(), bb->a + bb->b));
    }
  }
}

void AttenuationSpec::validate() const {
  if (!(alpha_db_per_km > 0.0)) {
    throw DomainError(fmt::format("attenuation.alpha_db_per_km must be > 0, got {}", alpha_db_per_km));
  }
  if (!(r_exponent > 0.0)) {
    throw DomainError(fmt::format("attenuation.r_exponent must be > 0, got {}", r_exponent));
  }
  if (!(eta_d > 0.0 && eta_d <= 1.0)) {
    throw DomainError(fmt::format("attenuation.eta_d must lie in (0, 1], got {}", eta_d));
  }
  if (!(p_d > 0.0 && p_d < eta_d)) {
    throw DomainError(fmt::format("attenuation.p_d must lie in (0, eta_d), got {}", p_d));
  }
}

void CostParams::validate() const {
  if (!(c_qkd > 0.0)) throw DomainError(fmt::format("costs.c_qkd must be > 0, got {}", c_qkd));
  if (!(c_node >= 0.0)) throw DomainError(fmt::format("costs.c_node must be >= 0, got {}", c_node));
}

double lambda_from_attenuation(const AttenuationSpec& spec) {
  spec.validate();
  return 10.0 / (spec.alpha_db_per_km * spec.r_exponent * std::log(10.0));
}

double drop_distance(const AttenuationSpec& spec, double lambda_km) {
  if (!(spec.p_d < spec.eta_d)) {
    throw DomainError("drop_distance: dark-count probability must be below detector efficiency");
  }
  if (!(lambda_km > 0.0)) throw DomainError("drop_distance: lambda must be positive");
  return lambda_km * std::log(spec.eta_d / spec.p_d);
}

double rate(const LinkModel& model, double ell_km) {
  if (!(ell_km >= 0.0)) {
    throw DomainError(fmt::format("rate: distance must be >= 0, got {}", ell_km));
  }
  const double x = ell_km / model.lambda_qkd;
  const double envelope = model.r0 * std::exp(-x);
  if (const auto* bb = std::get_if<Bb84DarkCount>(&model.variant)) {
    return envelope * secret_fraction(*bb, x);
  }
  return envelope;
}

double max_distance(const LinkModel& model) {
  if (const auto* bb = std::get_if<Bb84DarkCount>(&model.variant)) {
    return model.lambda_qkd * std::log((bb84_error_cutoff() - bb->a) / bb->b);
  }
  return std::numeric_limits<double>::infinity();
}

double per_bit_cost(const LinkModel& model, const CostParams& costs, double ell_km) {
  const double r = rate(model, ell_km);
  if (!(r > 0.0)) {
    throw InfeasibleDistance(
        fmt::format("no secret key is produced over {} km (rate is zero)", ell_km), ell_km);
  }
  return costs.c_qkd / r;
}

ConcavityReport check_log_concavity(const std::function<double(double)>& rate_fn, double lo_km,
                                    double hi_km, int n) {
  if (n < 3) throw DomainError("check_log_concavity: need at least 3 points");
  if (!(lo_km < hi_km)) throw DomainError("check_log_concavity: need lo < hi");

  std::vector<double> log_rate(static_cast<std::size_t>(n));
  const double step = (hi_km - lo_km) / (n - 1);
  double largest = 0.0;
  for (int i = 0; i < n; ++i) {
    const double ell = lo_km + step * i;
    const double r = rate_fn(ell);
    if (!(r > 0.0)) {
      throw InfeasibleDistance(fmt::format("rate is not positive at {} km", ell), ell);
    }
    log_rate[i] = std::log(r);
    largest = std::max(largest, std::abs(log_rate[i]));
  }

  ConcavityReport report;
  report.slack = 1e-9 * largest;
  report.worst_second_difference = -std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < n; ++i) {
    const double d2 = log_rate[i - 1] - 2.0 * log_rate[i] + log_rate[i + 1];
    if (d2 > report.worst_second_difference) {
      report.worst_second_difference = d2;
      report.worst_at_km = lo_km + step * i;
    }
  }
  report.pass = report.worst_second_difference <= report.slack;
  return report;
}

ConcavityReport check_log_concavity(const LinkModel& model, double lo_km, double hi_km, int n) {
  return check_log_concavity([&](double ell) { return rate(model, ell); }, lo_km, hi_km, n);
}

}  // namespace qkdnet
