#pragma once

#include <functional>
#include <variant>

namespace qkdnet {

/// Rate decays as R0 * exp(-l / lambda) at every distance.
struct PureExponential {};

/// Exponential detection envelope times the single-photon BB84 secret
/// fraction 1 - 2 h(p), with quantum bit error rate p(l) = a + b * exp(l / lambda).
struct Bb84DarkCount {
  double a = 0.0;  ///< error offset
  double b = 0.0;  ///< error slope coefficient
};

using RateVariant = std::variant<PureExponential, Bb84DarkCount>;

/// Secret-key rate curve of a single QKD link.
struct LinkModel {
  double r0 = 1.0;          ///< rate at zero distance, bit/s
  double lambda_qkd = 1.0;  ///< scaling length, km
  RateVariant variant = PureExponential{};

  /// Throws DomainError when r0 or lambda_qkd is not positive, or when the
  /// BB84 parameters leave no distance with positive rate.
  void validate() const;
  bool is_exponential() const { return std::holds_alternative<PureExponential>(variant); }
};

/// Fibre and detector figures from which lambda and the drop-off distance follow.
struct AttenuationSpec {
  double alpha_db_per_km = 0.22;
  double r_exponent = 1.0;  ///< rate scales as eta(l)^r
  double eta_d = 0.1;       ///< detector efficiency
  double p_d = 1e-6;        ///< dark-count probability per slot

  void validate() const;
};

/// Unit equipment costs.
struct CostParams {
  double c_qkd = 1.0;   ///< per QKD link (device pair)
  double c_node = 0.0;  ///< per trusted node

  void validate() const;
};

/// Binary entropy in bits. h(0) = h(1) = 0.
double binary_entropy(double p);

/// Error rate at which 1 - 2 h(p) vanishes (about 0.110028).
double bb84_error_cutoff();

/// lambda = 10 / (alpha * r * ln 10), km.
double lambda_from_attenuation(const AttenuationSpec& spec);

/// lambda * ln(eta_d / p_d), km. DomainError when p_d >= eta_d.
double drop_distance(const AttenuationSpec& spec, double lambda_km);

/// Secret-key rate in bit/s. Zero past the BB84 cutoff.
double rate(const LinkModel& model, double ell_km);

/// Largest distance with positive rate; +inf for PureExponential.
double max_distance(const LinkModel& model);

/// C(l) = C_QKD / R(l). InfeasibleDistance when the rate is zero.
double per_bit_cost(const LinkModel& model, const CostParams& costs, double ell_km);

struct ConcavityReport {
  bool pass = false;
  double worst_second_difference = 0.0;  ///< largest second difference of log R
  double worst_at_km = 0.0;
  double slack = 0.0;
};

/// Discrete midpoint-concavity check of log R on n equally spaced points.
/// InfeasibleDistance if the rate is not positive somewhere in [lo, hi].
ConcavityReport check_log_concavity(const LinkModel& model, double lo_km, double hi_km, int n);

/// Same check for an arbitrary rate curve.
ConcavityReport check_log_concavity(const std::function<double(double)>& rate_fn, double lo_km,
                                    double hi_km, int n);

}  // namespace qkdnet
