#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "qkdnet/errors.hpp"
#include "qkdnet/link_model.hpp"
#include "qkdnet/planar_chain.hpp"

namespace qkdnet {

/// Malformed or invalid scenario file. `path` is the dotted field path,
/// `line` is 1-based (0 when unknown).
class ConfigError : public Error {
 public:
  ConfigError(const std::string& what, std::string path, int line)
      : Error(what), path_(std::move(path)), line_(line) {}
  const std::string& path() const noexcept { return path_; }
  int line() const noexcept { return line_; }

 private:
  std::string path_;
  int line_;
};

struct McSettings {
  int replicas = 2000;      ///< delta Monte-Carlo replicas
  int pairs = 10'000;       ///< routed pairs / access queries
  std::uint64_t seed = 1;
  int side_in_alpha = 20;   ///< torus side in units of alpha_bb

  friend bool operator==(const McSettings&, const McSettings&) = default;
};

struct ScenarioConfig {
  /// Always carries a usable lambda_qkd, derived from `attenuation` when present.
  LinkModel link;
  std::optional<AttenuationSpec> attenuation;
  CostParams costs;
  PlanarScenario scenario;
  std::optional<double> alpha_bb;
  std::optional<McSettings> mc;
};

bool operator==(const ScenarioConfig& a, const ScenarioConfig& b);

ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::string& path);

/// YAML text that parses back to an equal config.
std::string serialize_config(const ScenarioConfig& cfg);

}  // namespace qkdnet
