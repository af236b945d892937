// qkdplan: scenario file in, cost reports and plot data out.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/core.h>

#include "qkdnet/commands.hpp"
#include "qkdnet/config.hpp"
#include "qkdnet/errors.hpp"

namespace {

enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kParse = 2,
  kInfeasible = 3,
  kNumerical = 4,
  kValidationFailed = 5,
};

struct Options {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string format = "json";
  std::string geometry_out;
  std::string mode = "paper-faithful";
  std::optional<double> ell_min;
  std::optional<double> ell_max;
  int steps = 200;
};

void emit(const Options& opt, const std::string& text) {
  if (opt.out.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream file(opt.out);
  if (!file) throw qkdnet::Error(fmt::format("cannot write '{}'", opt.out));
  file << text;
}

std::string render(const Options& opt, const nlohmann::json& doc) {
  return opt.format == "csv" ? qkdnet::to_csv(doc) : doc.dump(2) + "\n";
}

void write_geometry_file(const Options& opt, const qkdnet::ScenarioConfig& cfg) {
  if (opt.geometry_out.empty()) return;
  std::ofstream file(opt.geometry_out);
  if (!file) throw qkdnet::Error(fmt::format("cannot write '{}'", opt.geometry_out));
  qkdnet::dump_sample_geometry(cfg, file);
}

int run(const std::string& command, const Options& opt) {
  qkdnet::ScenarioConfig cfg = qkdnet::load_config(opt.config);
  if (opt.seed) {
    qkdnet::McSettings mc = cfg.mc.value_or(qkdnet::McSettings{});
    mc.seed = *opt.seed;
    cfg.mc = mc;
  }

  if (command == "link-curve") {
    const double lambda = cfg.link.lambda_qkd;
    const double reach = qkdnet::max_distance(cfg.link);
    const double lo = opt.ell_min.value_or(0.01 * lambda);
    const double hi = opt.ell_max.value_or(std::isfinite(reach) ? 0.999 * reach : 10.0 * lambda);
    const auto curve = qkdnet::cmd_link_curve(cfg, lo, hi, opt.steps);
    emit(opt, opt.format == "csv" ? qkdnet::to_csv(curve) : qkdnet::to_json(curve).dump(2) + "\n");
  } else if (command == "optimize") {
    emit(opt, render(opt, qkdnet::to_json(qkdnet::cmd_optimize(cfg))));
  } else if (command == "compare") {
    const auto mode = opt.mode == "full" ? qkdnet::ComparisonMode::Full
                                         : qkdnet::ComparisonMode::PaperFaithful;
    emit(opt, render(opt, qkdnet::to_json(qkdnet::cmd_compare(cfg, mode))));
    write_geometry_file(opt, cfg);
  } else if (command == "validate") {
    const auto report = qkdnet::cmd_validate(cfg);
    emit(opt, opt.format == "csv" ? qkdnet::to_csv(report)
                                  : qkdnet::to_json(report).dump(2) + "\n");
    write_geometry_file(opt, cfg);
    if (!report.all_pass()) {
      for (const auto& c : report.checks) {
        if (!c.pass) std::cerr << "validation failed: " << c.name << " (" << c.detail << ")\n";
      }
      return kValidationFailed;
    }
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QKD network deployment cost planner"};
  app.require_subcommand(1);
  Options opt;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", opt.config, "scenario file (YAML)")->required();
    sub->add_option("--out", opt.out, "write the report here instead of stdout");
    sub->add_option("--seed", opt.seed, "overrides mc.seed");
    sub->add_option("--format", opt.format, "output format")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto* link_curve = app.add_subcommand("link-curve", "rate and per-bit cost versus distance");
  common(link_curve);
  link_curve->add_option("--ell-min", opt.ell_min, "first distance, km (default 0.01 lambda)");
  link_curve->add_option("--ell-max", opt.ell_max,
                         "last distance, km (default 10 lambda, or just short of the BB84 cutoff)");
  link_curve->add_option("--steps", opt.steps, "number of rows")->check(CLI::Range(2, 10'000'000));

  auto* optimize = app.add_subcommand("optimize", "optimal chain spacing and backbone cell sizes");
  common(optimize);

  auto* compare = app.add_subcommand("compare", "chains versus backbone recommendation");
  common(compare);
  compare->add_option("--mode", opt.mode, "square-backbone costing")
      ->check(CLI::IsMember({"paper-faithful", "full"}));
  compare->add_option("--geometry-out", opt.geometry_out, "dump a sampled backbone geometry");

  auto* validate = app.add_subcommand("validate", "Monte-Carlo and quadrature oracle checks");
  common(validate);
  validate->add_option("--geometry-out", opt.geometry_out, "dump a sampled backbone geometry");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  try {
    return run(command, opt);
  } catch (const qkdnet::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kParse;
  } catch (const qkdnet::InfeasibleDistance& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return kInfeasible;
  } catch (const qkdnet::NumericalFailure& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kNumerical;
  } catch (const qkdnet::DomainError& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kUsage;
  } catch (const qkdnet::UnsupportedModel& e) {
    std::cerr << "unsupported: " << e.what() << "\n";
    return kUsage;
  } catch (const qkdnet::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kNumerical;
  }
}
