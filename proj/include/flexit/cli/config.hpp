#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "flexit/backends/interfaces.hpp"
#include "flexit/core/hyperparams.hpp"
#include "flexit/dataset/clusters.hpp"
#include "flexit/dataset/queries.hpp"

namespace flexit {

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnvVar = "FLEXIT_CONFIG";

struct EvaluationSettings {
  std::string classifier = "oracle";  // "oracle" (fixture prototypes) or "probe" (seeded linear)
  std::uint64_t classifier_seed = 7;
  int feature_dim = 16;
  std::uint64_t feature_seed = 11;
  int resolution = 256;
  double alpha = 0.0;
};

struct RunPaths {
  std::filesystem::path registry;
  std::filesystem::path index;
  std::filesystem::path queries;  // optional; built from registry + index when empty
  std::filesystem::path output;
};

/// Everything a command needs. JSON schema (all keys optional):
///   backend         {"id": "surrogate", ...factory options}
///   hyperparams     HyperParams fields by name, latent_norm as "L1" | "L2" | "L21"
///   paths           {"registry", "index", "queries", "output"}
///   registry_counts {"labels", "clusters", "groups"} for non-standard registries
///   filter          {"split", "cluster", "group", "limit"}
///   snapshot_steps  [int]
///   workers         int >= 1
///   query_seed, split_seed
///   evaluation      EvaluationSettings fields by name
struct RunConfig {
  nlohmann::json backend = {{"id", "surrogate"}};
  HyperParams hp;
  RunPaths paths;
  RegistryCounts registry_counts;
  QueryFilter filter;
  std::vector<int> snapshot_steps;
  int workers = 1;
  std::uint64_t query_seed = 0;
  std::uint64_t split_seed = 0;
  EvaluationSettings evaluation;

  std::string backend_id() const { return backend.at("id").get<std::string>(); }
  /// Throws ConfigError on the first invalid field.
  void validate() const;
};

nlohmann::ordered_json to_json(const RunConfig& config);
/// Relative paths are resolved against `base_dir`.
RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Applies a "dotted.key=value" override to a config JSON document; the value
/// is parsed as JSON when possible and kept as a string otherwise.
void apply_override(nlohmann::json& j, const std::string& assignment);

/// FNV-1a of the canonical config JSON with the output path removed, as hex.
std::string config_hash(const RunConfig& config);

/// Instantiates the configured backends. For the surrogate, unset
/// encode_resolution and seed default to the hyperparameters'.
BackendSet create_backends(const RunConfig& config, const HyperParams& hp);

}  // namespace flexit
