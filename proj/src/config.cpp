#include "qkdnet/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <sstream>
#include <string_view>

#include <fmt/core.h>
#include <yaml-cpp/yaml.h>

namespace qkdnet {

namespace {

int line_of(const YAML::Node& node) {
  const auto mark = node.Mark();
  return mark.line >= 0 ? mark.line + 1 : 0;
}

[[noreturn]] void fail(const std::string& path, int line, const std::string& message) {
  const std::string where = line > 0 ? fmt::format("line {}: ", line) : std::string{};
  throw ConfigError(fmt::format("{}{}: {}", where, path, message), path, line);
}

std::string join(std::string_view parent, std::string_view key) {
  return parent.empty() ? std::string(key) : fmt::format("{}.{}", parent, key);
}

// A mapping node together with its dotted path, for diagnostics.
class Section {
 public:
  Section(YAML::Node node, std::string path) : node_(std::move(node)), path_(std::move(path)) {
    if (!node_.IsMap()) fail(path_, line_of(node_), "expected a mapping");
  }

  const std::string& path() const { return path_; }
  int line() const { return line_of(node_); }

  void allow_only(std::initializer_list<std::string_view> keys) const {
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      bool known = false;
      for (auto k : keys) known = known || key == k;
      if (!known) fail(join(path_, key), line_of(kv.first), "unknown key");
    }
  }

  bool has(std::string_view key) const { return static_cast<bool>(node_[std::string(key)]); }

  std::optional<Section> section(std::string_view key) const {
    const YAML::Node child = node_[std::string(key)];
    if (!child) return std::nullopt;
    return Section(child, join(path_, key));
  }

  Section required_section(std::string_view key) const {
    auto s = section(key);
    if (!s) fail(join(path_, key), line(), "missing section");
    return *s;
  }

  std::optional<double> number(std::string_view key) const {
    const YAML::Node child = node_[std::string(key)];
    if (!child) return std::nullopt;
    const std::string path = join(path_, key);
    if (!child.IsScalar()) fail(path, line_of(child), "expected a number");
    double value = 0.0;
    try {
      value = child.as<double>();
    } catch (const YAML::Exception&) {
      fail(path, line_of(child), fmt::format("'{}' is not a number", child.Scalar()));
    }
    if (!std::isfinite(value)) fail(path, line_of(child), "must be finite");
    return value;
  }

  double required_number(std::string_view key) const {
    auto v = number(key);
    if (!v) fail(join(path_, key), line(), "missing value");
    return *v;
  }

  double required_positive(std::string_view key) const {
    const double v = required_number(key);
    if (!(v > 0.0)) fail(join(path_, key), line_of_key(key), fmt::format("must be positive, got {}", v));
    return v;
  }

  std::optional<double> optional_positive(std::string_view key) const {
    const auto v = number(key);
    if (v && !(*v > 0.0)) fail(join(path_, key), line_of_key(key), fmt::format("must be positive, got {}", *v));
    return v;
  }

  std::optional<std::int64_t> integer(std::string_view key) const {
    const YAML::Node child = node_[std::string(key)];
    if (!child) return std::nullopt;
    const std::string path = join(path_, key);
    if (!child.IsScalar()) fail(path, line_of(child), "expected an integer");
    try {
      return child.as<std::int64_t>();
    } catch (const YAML::Exception&) {
      fail(path, line_of(child), fmt::format("'{}' is not an integer", child.Scalar()));
    }
  }

  std::optional<std::string> text(std::string_view key) const {
    const YAML::Node child = node_[std::string(key)];
    if (!child) return std::nullopt;
    if (!child.IsScalar()) fail(join(path_, key), line_of(child), "expected a string");
    return child.Scalar();
  }

  int line_of_key(std::string_view key) const {
    const YAML::Node child = node_[std::string(key)];
    return child ? line_of(child) : line();
  }

 private:
  YAML::Node node_;
  std::string path_;
};

// Runs a module validate() and re-raises its message against a field path.
template <typename Fn>
void check(const Section& s, Fn&& validate) {
  try {
    validate();
  } catch (const DomainError& e) {
    fail(s.path(), s.line(), e.what());
  }
}

int positive_int(const Section& s, std::string_view key, int fallback) {
  const auto v = s.integer(key);
  if (!v) return fallback;
  if (*v <= 0 || *v > std::numeric_limits<int>::max()) {
    fail(join(s.path(), key), s.line_of_key(key), "must be a positive integer");
  }
  return static_cast<int>(*v);
}

ScenarioConfig from_yaml(const YAML::Node& root_node) {
  if (!root_node || root_node.IsNull()) fail("<root>", 0, "empty configuration");
  const Section root(root_node, "");
  root.allow_only({"link", "costs", "scenario", "backbone", "mc"});

  ScenarioConfig cfg;

  const Section link = root.required_section("link");
  link.allow_only({"r0", "lambda_qkd", "attenuation", "variant", "bb84_a", "bb84_b"});
  cfg.link.r0 = link.required_positive("r0");
  const auto lambda = link.optional_positive("lambda_qkd");
  const auto att = link.section("attenuation");
  if (lambda && att) fail(link.path(), link.line(), "give either lambda_qkd or attenuation, not both");
  if (!lambda && !att) fail(link.path(), link.line(), "one of lambda_qkd or attenuation is required");
  if (att) {
    att->allow_only({"alpha_db_per_km", "r_exponent", "eta_d", "p_d"});
    AttenuationSpec spec;
    spec.alpha_db_per_km = att->required_positive("alpha_db_per_km");
    spec.r_exponent = att->optional_positive("r_exponent").value_or(spec.r_exponent);
    spec.eta_d = att->optional_positive("eta_d").value_or(spec.eta_d);
    spec.p_d = att->optional_positive("p_d").value_or(spec.p_d);
    check(*att, [&] { spec.validate(); });
    cfg.attenuation = spec;
    cfg.link.lambda_qkd = lambda_from_attenuation(spec);
  } else {
    cfg.link.lambda_qkd = *lambda;
  }
  const std::string variant = link.text("variant").value_or("exponential");
  if (variant == "exponential") {
    if (link.has("bb84_a") || link.has("bb84_b")) {
      fail(join(link.path(), "bb84_a"), link.line(), "only allowed with variant: bb84");
    }
    cfg.link.variant = PureExponential{};
  } else if (variant == "bb84") {
    cfg.link.variant = Bb84DarkCount{link.required_number("bb84_a"), link.required_number("bb84_b")};
  } else {
    fail(join(link.path(), "variant"), link.line_of_key("variant"),
         fmt::format("'{}' is not one of exponential, bb84", variant));
  }
  check(link, [&] { cfg.link.validate(); });

  const Section costs = root.required_section("costs");
  costs.allow_only({"c_qkd", "c_node"});
  cfg.costs.c_qkd = costs.required_positive("c_qkd");
  cfg.costs.c_node = costs.number("c_node").value_or(0.0);
  if (cfg.costs.c_node < 0.0) fail(join(costs.path(), "c_node"), costs.line_of_key("c_node"), "must be >= 0");
  check(costs, [&] { cfg.costs.validate(); });

  const Section scenario = root.required_section("scenario");
  scenario.allow_only({"length_l", "alpha_u", "volume_v"});
  cfg.scenario.length_l = scenario.required_positive("length_l");
  cfg.scenario.alpha_u = scenario.required_positive("alpha_u");
  cfg.scenario.volume_v = scenario.required_positive("volume_v");
  check(scenario, [&] { cfg.scenario.validate(); });

  if (const auto backbone = root.section("backbone")) {
    backbone->allow_only({"alpha_bb"});
    cfg.alpha_bb = backbone->optional_positive("alpha_bb");
  }

  if (const auto mc = root.section("mc")) {
    mc->allow_only({"replicas", "pairs", "seed", "side_in_alpha"});
    McSettings m;
    m.replicas = positive_int(*mc, "replicas", m.replicas);
    m.pairs = positive_int(*mc, "pairs", m.pairs);
    m.side_in_alpha = positive_int(*mc, "side_in_alpha", m.side_in_alpha);
    if (const auto seed = mc->text("seed")) {
      const std::string path = join(mc->path(), "seed");
      if (seed->empty() || seed->front() == '-') fail(path, mc->line_of_key("seed"), "must be non-negative");
      try {
        m.seed = YAML::Load(*seed).as<std::uint64_t>();
      } catch (const YAML::Exception&) {
        fail(path, mc->line_of_key("seed"), fmt::format("'{}' is not an integer", *seed));
      }
    }
    if (m.replicas < 2) fail(join(mc->path(), "replicas"), mc->line_of_key("replicas"), "must be at least 2");
    if (m.pairs < 100) fail(join(mc->path(), "pairs"), mc->line_of_key("pairs"), "must be at least 100");
    if (m.side_in_alpha < 10) {
      fail(join(mc->path(), "side_in_alpha"), mc->line_of_key("side_in_alpha"), "must be at least 10");
    }
    cfg.mc = m;
  }
  return cfg;
}

std::string num(double v) { return fmt::format("{}", v); }

}  // namespace

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b) {
  const auto same_variant = [](const RateVariant& x, const RateVariant& y) {
    if (x.index() != y.index()) return false;
    if (const auto* bx = std::get_if<Bb84DarkCount>(&x)) {
      const auto& by = std::get<Bb84DarkCount>(y);
      return bx->a == by.a && bx->b == by.b;
    }
    return true;
  };
  const auto same_att = [](const std::optional<AttenuationSpec>& x,
                           const std::optional<AttenuationSpec>& y) {
    if (x.has_value() != y.has_value()) return false;
    if (!x) return true;
    return x->alpha_db_per_km == y->alpha_db_per_km && x->r_exponent == y->r_exponent &&
           x->eta_d == y->eta_d && x->p_d == y->p_d;
  };
  return a.link.r0 == b.link.r0 && a.link.lambda_qkd == b.link.lambda_qkd &&
         same_variant(a.link.variant, b.link.variant) && same_att(a.attenuation, b.attenuation) &&
         a.costs.c_qkd == b.costs.c_qkd && a.costs.c_node == b.costs.c_node &&
         a.scenario.length_l == b.scenario.length_l && a.scenario.alpha_u == b.scenario.alpha_u &&
         a.scenario.volume_v == b.scenario.volume_v && a.alpha_bb == b.alpha_bb && a.mc == b.mc;
}

ScenarioConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    const int line = e.mark.line >= 0 ? e.mark.line + 1 : 0;
    fail("<syntax>", line, e.msg);
  }
  return from_yaml(root);
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot open config file '{}'", path), "<file>", 0);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ScenarioConfig& cfg) {
  YAML::Emitter out;
  out << YAML::BeginMap;

  out << YAML::Key << "link" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "r0" << YAML::Value << num(cfg.link.r0);
  if (cfg.attenuation) {
    const auto& a = *cfg.attenuation;
    out << YAML::Key << "attenuation" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "alpha_db_per_km" << YAML::Value << num(a.alpha_db_per_km);
    out << YAML::Key << "r_exponent" << YAML::Value << num(a.r_exponent);
    out << YAML::Key << "eta_d" << YAML::Value << num(a.eta_d);
    out << YAML::Key << "p_d" << YAML::Value << num(a.p_d);
    out << YAML::EndMap;
  } else {
    out << YAML::Key << "lambda_qkd" << YAML::Value << num(cfg.link.lambda_qkd);
  }
  if (const auto* bb = std::get_if<Bb84DarkCount>(&cfg.link.variant)) {
    out << YAML::Key << "variant" << YAML::Value << "bb84";
    out << YAML::Key << "bb84_a" << YAML::Value << num(bb->a);
    out << YAML::Key << "bb84_b" << YAML::Value << num(bb->b);
  } else {
    out << YAML::Key << "variant" << YAML::Value << "exponential";
  }
  out << YAML::EndMap;

  out << YAML::Key << "costs" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "c_qkd" << YAML::Value << num(cfg.costs.c_qkd);
  out << YAML::Key << "c_node" << YAML::Value << num(cfg.costs.c_node);
  out << YAML::EndMap;

  out << YAML::Key << "scenario" << YAML::Value << YAML::BeginMap;
  out << YAML::Key << "length_l" << YAML::Value << num(cfg.scenario.length_l);
  out << YAML::Key << "alpha_u" << YAML::Value << num(cfg.scenario.alpha_u);
  out << YAML::Key << "volume_v" << YAML::Value << num(cfg.scenario.volume_v);
  out << YAML::EndMap;

  if (cfg.alpha_bb) {
    out << YAML::Key << "backbone" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "alpha_bb" << YAML::Value << num(*cfg.alpha_bb);
    out << YAML::EndMap;
  }
  if (cfg.mc) {
    out << YAML::Key << "mc" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "replicas" << YAML::Value << cfg.mc->replicas;
    out << YAML::Key << "pairs" << YAML::Value << cfg.mc->pairs;
    out << YAML::Key << "seed" << YAML::Value << cfg.mc->seed;
    out << YAML::Key << "side_in_alpha" << YAML::Value << cfg.mc->side_in_alpha;
    out << YAML::EndMap;
  }
  out << YAML::EndMap;
  return std::string(out.c_str()) + "\n";
}

}  // namespace qkdnet
