#include "qkdnet/commands.hpp"

#include <cmath>
#include <cstdint>
#include <ostream>
#include <random>

#include <fmt/core.h>

#include "qkdnet/backbone_square.hpp"
#include "qkdnet/backbone_stochastic.hpp"
#include "qkdnet/chain.hpp"
#include "qkdnet/detail/parallel.hpp"
#include "qkdnet/geometry_sim.hpp"

namespace qkdnet {

namespace {

// Slope of ln R by central differences, one-sided near the ends of the support.
double log_rate_slope(const LinkModel& model, double ell, double reach) {
  const double h = 1e-5 * model.lambda_qkd;
  double lo = std::max(0.0, ell - h);
  double hi = ell + h;
  if (hi >= reach) hi = ell;
  if (!(hi > lo)) return -std::numeric_limits<double>::infinity();
  return (std::log(rate(model, hi)) - std::log(rate(model, lo))) / (hi - lo);
}

McConfig mc_config(const McSettings& mc) {
  McConfig c;
  c.side_in_alpha = mc.side_in_alpha;
  c.samples = mc.pairs;
  c.seed = mc.seed;
  return c;
}

const McSettings& require_mc(const ScenarioConfig& cfg) {
  if (!cfg.mc) throw ConfigError("the mc section is required for validation", "mc", 0);
  return *cfg.mc;
}

// The oracles compare against closed forms that exist only for the
// exponential rate, so a BB84 link is validated on its exponential envelope.
LinkModel envelope(const LinkModel& model) { return LinkModel{model.r0, model.lambda_qkd, {}}; }

ValidationCheck z_check(std::string name, const McEstimate& mc, double reference,
                        double max_rel_se) {
  ValidationCheck c;
  c.name = std::move(name);
  c.metric = "z";
  c.value = mc.z_score(reference);
  c.threshold = 3.0;
  c.pass = std::abs(c.value) <= c.threshold && mc.relative_error() <= max_rel_se;
  c.detail = fmt::format("estimate {:.8g} +- {:.3g} (rel {:.3g}), reference {:.8g}", mc.estimate,
                         mc.std_error, mc.relative_error(), reference);
  return c;
}

std::int64_t manhattan_brute_force(std::int64_t n) {
  std::int64_t total = 0;
  for (std::int64_t a = 0; a < n * n; ++a) {
    for (std::int64_t b = 0; b < n * n; ++b) {
      total += std::abs(a / n - b / n) + std::abs(a % n - b % n);
    }
  }
  return total;
}

nlohmann::json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

nlohmann::json breakdown_json(const CostBreakdown& b) {
  nlohmann::json j;
  j["local"] = std::isfinite(b.local) ? nlohmann::json(b.local) : nlohmann::json(nullptr);
  j["backbone"] = std::isfinite(b.backbone) ? nlohmann::json(b.backbone) : nlohmann::json(nullptr);
  j["node"] = std::isfinite(b.node) ? nlohmann::json(b.node) : nlohmann::json(nullptr);
  j["total"] = std::isfinite(b.total) ? nlohmann::json(b.total) : nlohmann::json(nullptr);
  j["warnings"] = b.warnings;
  return j;
}

void flatten(const nlohmann::json& node, const std::string& prefix, std::string& out) {
  if (node.is_object()) {
    for (const auto& [key, value] : node.items()) {
      flatten(value, prefix.empty() ? key : prefix + "." + key, out);
    }
  } else if (node.is_array()) {
    for (std::size_t i = 0; i < node.size(); ++i) {
      flatten(node[i], fmt::format("{}[{}]", prefix, i), out);
    }
  } else {
    std::string value = node.is_string() ? node.get<std::string>() : node.dump();
    if (value.find_first_of(",\"\n") != std::string::npos) {
      std::string quoted = "\"";
      for (char ch : value) quoted += ch == '"' ? std::string("\"\"") : std::string(1, ch);
      value = quoted + "\"";
    }
    out += fmt::format("{},{}\n", prefix, value);
  }
}

}  // namespace

LinkCurve cmd_link_curve(const ScenarioConfig& cfg, double ell_min, double ell_max, int steps) {
  if (steps < 2) throw DomainError(fmt::format("link-curve needs at least 2 steps, got {}", steps));
  if (!(ell_min > 0.0) || !(ell_max > ell_min)) {
    throw DomainError(fmt::format("link-curve needs 0 < ell_min < ell_max, got [{}, {}]", ell_min,
                                  ell_max));
  }
  const LinkModel& model = cfg.link;
  const double reach = max_distance(model);
  if (!(ell_max < reach)) {
    throw InfeasibleDistance(
        fmt::format("ell_max = {} km is at or beyond the zero-rate distance {} km", ell_max, reach),
        ell_max);
  }

  LinkCurve curve;
  curve.ell_opt_km =
      chain_optimal_spacing(model, cfg.costs, {cfg.scenario.length_l, cfg.scenario.volume_v}).ell_km;
  if (!model.is_exponential()) curve.cutoff_km = reach;

  const double steep = 1.1 / model.lambda_qkd;
  std::size_t closest = 0;
  for (int i = 0; i < steps; ++i) {
    const double ell =
        i == steps - 1 ? ell_max : ell_min + (ell_max - ell_min) * i / static_cast<double>(steps - 1);
    const double r = rate(model, ell);
    const double c = per_bit_cost(model, cfg.costs, ell);
    const bool drop = !model.is_exponential() && std::abs(log_rate_slope(model, ell, reach)) > steep;
    curve.rows.push_back({ell, r, std::log10(r), c, c / ell, false, drop});
    if (std::abs(ell - curve.ell_opt_km) < std::abs(curve.rows[closest].ell_km - curve.ell_opt_km)) {
      closest = curve.rows.size() - 1;
    }
  }
  curve.rows[closest].at_optimum = true;
  return curve;
}

OptimizeReport cmd_optimize(const ScenarioConfig& cfg) {
  const LinkModel& model = cfg.link;
  OptimizeReport report;
  report.lambda_km = model.lambda_qkd;

  const auto chain = chain_optimal_spacing(model, cfg.costs,
                                           {cfg.scenario.length_l, cfg.scenario.volume_v});
  report.chain = {chain.ell_km, chain.cost, "chain_total_cost", ""};

  const double square = square_optimal_cell(model, cfg.costs);
  report.square = {square, per_bit_cost(model, cfg.costs, square) / square, "cost_per_bps_per_km",
                   ""};

  report.stochastic.objective_name = "kappa_bb";
  if (model.is_exponential()) {
    const double a = optimal_alpha_bb(model, cfg.costs);
    report.stochastic.alpha_km = a;
    report.stochastic.objective = kappa_bb_closed_form(model, cfg.costs, a);
  } else {
    report.stochastic.note = "closed-form kappa_bb exists only for the exponential rate";
  }
  return report;
}

Recommendation cmd_compare(const ScenarioConfig& cfg, ComparisonMode mode) {
  RecommendOptions options;
  options.mode = mode;
  options.include_stochastic = true;
  options.alpha_bb_override = cfg.alpha_bb;
  return recommend(cfg.link, cfg.costs, cfg.scenario, options);
}

bool ValidationReport::all_pass() const {
  for (const auto& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

ValidationReport cmd_validate(const ScenarioConfig& cfg) {
  const McSettings& mc = require_mc(cfg);
  const LinkModel model = envelope(cfg.link);
  const double alpha = cfg.alpha_bb.value_or(model.lambda_qkd);
  ValidationReport report;

  {
    const double au = cfg.scenario.alpha_u;
    const PlanarScenario ref{10.0 * au, au, cfg.scenario.volume_v};
    const auto est = delta_monte_carlo(ref, mc.replicas, detail::derive_seed(mc.seed, 11, 0));
    report.checks.push_back(z_check("gamma_mc", est, delta_analytic(ref), 0.02));
  }
  {
    McConfig c = mc_config(mc);
    c.seed = detail::derive_seed(mc.seed, 12, 0);
    const auto est = estimate_kappa_loc_mc(model, cfg.costs, alpha, c);
    report.checks.push_back(z_check("kappa_loc_mc", est, kappa_loc(model, cfg.costs, alpha), 0.02));
  }
  {
    McConfig c = mc_config(mc);
    c.seed = detail::derive_seed(mc.seed, 13, 0);
    const auto est = estimate_kappa_bb_mc(model, cfg.costs, alpha, c);
    report.checks.push_back(
        z_check("kappa_bb_mc", est, kappa_bb_closed_form(model, cfg.costs, alpha), 0.02));
  }
  {
    const double closed = kappa_bb_closed_form(model, cfg.costs, alpha);
    const double triple = kappa_bb_quadrature(model, cfg.costs, alpha);
    const double reduced = kappa_bb_reduced(model, cfg.costs, alpha);
    ValidationCheck c;
    c.name = "lemma_vs_quadrature";
    c.metric = "rel_error";
    c.value = std::max(std::abs(triple - closed), std::abs(reduced - closed)) / std::abs(closed);
    c.threshold = 1e-6;
    c.pass = c.value <= c.threshold;
    c.detail = fmt::format("closed {:.12g}, triple {:.12g}, reduced {:.12g}", closed, triple, reduced);
    report.checks.push_back(c);
  }
  {
    ValidationCheck c;
    c.name = "manhattan_bruteforce";
    c.metric = "mismatches";
    int mismatches = 0;
    for (std::int64_t n = 1; n <= 40; ++n) {
      if (manhattan_brute_force(n) != manhattan_hop_sum(n)) ++mismatches;
    }
    c.value = mismatches;
    c.threshold = 0.0;
    c.pass = mismatches == 0;
    c.detail = "N = 1..40";
    report.checks.push_back(c);
  }
  return report;
}

void dump_sample_geometry(const ScenarioConfig& cfg, std::ostream& out) {
  const double alpha = cfg.alpha_bb.value_or(cfg.link.lambda_qkd);
  const McSettings mc = cfg.mc.value_or(McSettings{});
  const double side = mc.side_in_alpha * alpha;
  PointSet nodes = sample_poisson(1.0 / (alpha * alpha), side, detail::derive_seed(mc.seed, 21, 0), true);
  for (std::uint64_t attempt = 1; nodes.empty(); ++attempt) {
    nodes = sample_poisson(1.0 / (alpha * alpha), side, detail::derive_seed(mc.seed, 21, attempt), true);
  }
  std::mt19937_64 rng(detail::derive_seed(mc.seed, 22, 0));
  std::uniform_real_distribution<double> coord(0.0, side);
  const Point u{coord(rng), coord(rng)};
  const Point v{coord(rng), coord(rng)};
  const MarkovPath path = markov_path(nodes, u, v);
  write_geometry(out, nodes, std::span<const MarkovPath>(&path, 1));
}

nlohmann::json to_json(const LinkCurve& curve) {
  nlohmann::json j;
  j["ell_opt_km"] = curve.ell_opt_km;
  j["cutoff_km"] = optional_number(curve.cutoff_km);
  j["rows"] = nlohmann::json::array();
  for (const auto& r : curve.rows) {
    j["rows"].push_back({{"ell_km", r.ell_km},
                         {"rate_bps", r.rate_bps},
                         {"log10_rate", r.log10_rate},
                         {"cost_per_bps", r.cost_per_bps},
                         {"cost_per_bps_per_km", r.cost_per_bps_per_km},
                         {"at_optimum", r.at_optimum},
                         {"drop_off", r.drop_off}});
  }
  return j;
}

nlohmann::json to_json(const OptimizeReport& report) {
  const auto entry = [&](const OptimumEntry& e) {
    nlohmann::json j;
    j["spacing_km"] = optional_number(e.alpha_km);
    j["spacing_over_lambda"] =
        e.alpha_km ? nlohmann::json(*e.alpha_km / report.lambda_km) : nlohmann::json(nullptr);
    j["objective"] = optional_number(e.objective);
    j["objective_name"] = e.objective_name;
    if (!e.note.empty()) j["note"] = e.note;
    return j;
  };
  nlohmann::json j;
  j["lambda_km"] = report.lambda_km;
  j["chain"] = entry(report.chain);
  j["square"] = entry(report.square);
  j["stochastic"] = entry(report.stochastic);
  if (report.stochastic.alpha_km) {
    j["stochastic"]["lambda_over_spacing"] = report.lambda_km / *report.stochastic.alpha_km;
  }
  return j;
}

nlohmann::json to_json(const Recommendation& rec) {
  nlohmann::json j;
  j["chosen"] = std::string(to_string(rec.chosen));
  j["mode"] = std::string(to_string(rec.mode));
  j["rationale"] = rec.rationale;
  j["costs"] = nlohmann::json::object();
  for (const auto& [arch, breakdown] : rec.costs) {
    j["costs"][std::string(to_string(arch))] = breakdown_json(breakdown);
  }
  j["square_backbone_other_mode"] = breakdown_json(rec.square_other_mode);
  j["ell_opt_km"] = rec.ell_opt_km;
  j["alpha_bb_km"] = rec.alpha_bb_opt_km;
  j["alpha_bb_stochastic_km"] = optional_number(rec.alpha_bb_stochastic_km);
  j["sigma_per_km2"] = rec.sigma;
  j["sigma_star_per_km2"] = rec.sigma_star;
  j["min_users"] = rec.min_users;
  j["necessary_condition_holds"] = rec.necessary_condition_holds;
  j["full_inequality_holds"] = rec.full_inequality_holds;
  return j;
}

nlohmann::json to_json(const ValidationReport& report) {
  nlohmann::json j;
  j["all_pass"] = report.all_pass();
  j["checks"] = nlohmann::json::array();
  for (const auto& c : report.checks) {
    j["checks"].push_back({{"name", c.name},
                           {"pass", c.pass},
                           {"metric", c.metric},
                           {"value", c.value},
                           {"threshold", c.threshold},
                           {"detail", c.detail}});
  }
  return j;
}

std::string to_csv(const LinkCurve& curve) {
  std::string out =
      "ell_km,rate_bps,log10_rate_bps,cost_per_bps,cost_per_bps_per_km,at_optimum,drop_off\n";
  for (const auto& r : curve.rows) {
    out += fmt::format("{:.17g},{:.17g},{:.17g},{:.17g},{:.17g},{},{}\n", r.ell_km, r.rate_bps,
                       r.log10_rate, r.cost_per_bps, r.cost_per_bps_per_km, int{r.at_optimum},
                       int{r.drop_off});
  }
  return out;
}

std::string to_csv(const ValidationReport& report) {
  std::string out = "check,pass,metric,value,threshold\n";
  for (const auto& c : report.checks) {
    out += fmt::format("{},{},{},{:.17g},{:.17g}\n", c.name, c.pass ? "PASS" : "FAIL", c.metric,
                       c.value, c.threshold);
  }
  return out;
}

std::string to_csv(const nlohmann::json& doc) {
  std::string out = "field,value\n";
  flatten(doc, "", out);
  return out;
}

}  // namespace qkdnet
