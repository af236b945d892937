#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qkdnet/config.hpp"
#include "qkdnet/planner.hpp"

namespace qkdnet {

struct LinkCurveRow {
  double ell_km;
  double rate_bps;
  double log10_rate;
  double cost_per_bps;         ///< C(l)
  double cost_per_bps_per_km;  ///< C(l) / l
  bool at_optimum;             ///< row closest to the chain optimum
  bool drop_off;               ///< |d ln R / dl| > 1.1 / lambda
};

struct LinkCurve {
  std::vector<LinkCurveRow> rows;
  double ell_opt_km = 0.0;
  std::optional<double> cutoff_km;
};

/// `steps` equally spaced distances from ell_min to ell_max inclusive.
LinkCurve cmd_link_curve(const ScenarioConfig& cfg, double ell_min, double ell_max, int steps);

struct OptimumEntry {
  std::optional<double> alpha_km;  ///< optimal spacing or cell size
  std::optional<double> objective;
  std::string objective_name;
  std::string note;
};

struct OptimizeReport {
  double lambda_km = 0.0;
  OptimumEntry chain;       ///< total chain cost over the scenario's L and V
  OptimumEntry square;      ///< C(alpha) / alpha
  OptimumEntry stochastic;  ///< kappa_bb(alpha)
};

OptimizeReport cmd_optimize(const ScenarioConfig& cfg);

Recommendation cmd_compare(const ScenarioConfig& cfg, ComparisonMode mode);

struct ValidationCheck {
  std::string name;
  bool pass = false;
  std::string metric;  ///< "z", "rel_error" or "mismatches"
  double value = 0.0;
  double threshold = 0.0;
  std::string detail;
};

struct ValidationReport {
  std::vector<ValidationCheck> checks;
  bool all_pass() const;
};

/// Requires the mc section. Runs the Monte-Carlo and quadrature oracles.
ValidationReport cmd_validate(const ScenarioConfig& cfg);

/// One torus node set at the configured spacing and the Markov path between
/// two random users, in the `node x y` / `path ...` line format.
void dump_sample_geometry(const ScenarioConfig& cfg, std::ostream& out);

nlohmann::json to_json(const LinkCurve& curve);
nlohmann::json to_json(const OptimizeReport& report);
nlohmann::json to_json(const Recommendation& rec);
nlohmann::json to_json(const ValidationReport& report);

std::string to_csv(const LinkCurve& curve);
std::string to_csv(const ValidationReport& report);
/// Flattens nested objects into `field,value` rows with dotted field names.
std::string to_csv(const nlohmann::json& doc);

}  // namespace qkdnet
