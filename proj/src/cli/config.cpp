#include "flexit/cli/config.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "flexit/backends/registry.hpp"
#include "flexit/core/errors.hpp"
#include "flexit/core/random.hpp"

namespace flexit {

namespace {

void check_keys(const nlohmann::json& j, const std::string& where, const std::set<std::string>& allowed) {
  if (!j.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, value] : j.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown config key '" + where + "." + key + "'");
  }
}

template <typename T>
void read(const nlohmann::json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("config key '" + where + "." + key + "' has the wrong type");
  }
}

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  if (p.empty()) return {};
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

HyperParams hyperparams_from_json(const nlohmann::json& j) {
  check_keys(j, "hyperparams",
             {"lambda_image", "lambda_source", "lambda_perceptual", "lambda_latent", "step_size",
              "steps", "augmentations", "latent_norm", "encode_resolution", "metric_resolution",
              "rng_seed"});
  HyperParams hp;
  const std::string w = "hyperparams";
  read(j, "lambda_image", hp.lambda_image, w);
  read(j, "lambda_source", hp.lambda_source, w);
  read(j, "lambda_perceptual", hp.lambda_perceptual, w);
  read(j, "lambda_latent", hp.lambda_latent, w);
  read(j, "step_size", hp.step_size, w);
  read(j, "steps", hp.steps, w);
  read(j, "augmentations", hp.augmentations, w);
  read(j, "encode_resolution", hp.encode_resolution, w);
  read(j, "metric_resolution", hp.metric_resolution, w);
  read(j, "rng_seed", hp.rng_seed, w);
  if (j.contains("latent_norm")) {
    try {
      hp.latent_norm = parse_latent_norm(j["latent_norm"].get<std::string>());
    } catch (const std::exception& e) {
      throw ConfigError(std::string("hyperparams.latent_norm: ") + e.what());
    }
  }
  return hp;
}

}  // namespace

void RunConfig::validate() const {
  try {
    hp.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("hyperparams: ") + e.what());
  }
  if (!backend.is_object() || !backend.contains("id") || !backend["id"].is_string()) {
    throw ConfigError("backend.id must be a string");
  }
  if (workers < 1) throw ConfigError("workers must be >= 1");
  for (int s : snapshot_steps) {
    if (s < 0 || s > hp.steps) {
      throw ConfigError("snapshot step " + std::to_string(s) + " outside [0, " + std::to_string(hp.steps) + "]");
    }
  }
  if (evaluation.classifier != "oracle" && evaluation.classifier != "probe") {
    throw ConfigError("evaluation.classifier must be 'oracle' or 'probe'");
  }
  if (evaluation.feature_dim < 1) throw ConfigError("evaluation.feature_dim must be >= 1");
  if (evaluation.resolution < kMinImageSide) throw ConfigError("evaluation.resolution must be >= 8");
  if (!(evaluation.alpha >= 0)) throw ConfigError("evaluation.alpha must be >= 0");
  if (filter.limit && *filter.limit == 0) throw ConfigError("filter.limit must be positive");
}

nlohmann::ordered_json to_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["backend"] = c.backend;
  j["hyperparams"] = {{"lambda_image", c.hp.lambda_image},
                      {"lambda_source", c.hp.lambda_source},
                      {"lambda_perceptual", c.hp.lambda_perceptual},
                      {"lambda_latent", c.hp.lambda_latent},
                      {"step_size", c.hp.step_size},
                      {"steps", c.hp.steps},
                      {"augmentations", c.hp.augmentations},
                      {"latent_norm", to_string(c.hp.latent_norm)},
                      {"encode_resolution", c.hp.encode_resolution},
                      {"metric_resolution", c.hp.metric_resolution},
                      {"rng_seed", c.hp.rng_seed}};
  j["paths"] = {{"registry", c.paths.registry.string()},
                {"index", c.paths.index.string()},
                {"queries", c.paths.queries.string()},
                {"output", c.paths.output.string()}};
  j["registry_counts"] = {{"labels", c.registry_counts.labels},
                          {"clusters", c.registry_counts.clusters},
                          {"groups", c.registry_counts.groups}};
  nlohmann::ordered_json filter = nlohmann::ordered_json::object();
  if (c.filter.split) filter["split"] = to_string(*c.filter.split);
  if (c.filter.cluster) filter["cluster"] = *c.filter.cluster;
  if (c.filter.group) filter["group"] = *c.filter.group;
  if (c.filter.limit) filter["limit"] = *c.filter.limit;
  j["filter"] = filter;
  j["snapshot_steps"] = c.snapshot_steps;
  j["workers"] = c.workers;
  j["query_seed"] = c.query_seed;
  j["split_seed"] = c.split_seed;
  j["evaluation"] = {{"classifier", c.evaluation.classifier},
                     {"classifier_seed", c.evaluation.classifier_seed},
                     {"feature_dim", c.evaluation.feature_dim},
                     {"feature_seed", c.evaluation.feature_seed},
                     {"resolution", c.evaluation.resolution},
                     {"alpha", c.evaluation.alpha}};
  return j;
}

RunConfig config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  check_keys(j, "config",
             {"backend", "hyperparams", "paths", "registry_counts", "filter", "snapshot_steps",
              "workers", "query_seed", "split_seed", "evaluation"});
  RunConfig c;
  c.paths.registry = std::filesystem::path(FLEXIT_DATA_DIR) / "imagenet_clusters.json";
  if (j.contains("backend")) {
    if (j["backend"].is_string()) {
      c.backend = {{"id", j["backend"]}};
    } else {
      c.backend = j["backend"];
      if (!c.backend.contains("id")) c.backend["id"] = "surrogate";
    }
  }
  if (j.contains("hyperparams")) c.hp = hyperparams_from_json(j["hyperparams"]);
  if (j.contains("paths")) {
    const auto& p = j["paths"];
    check_keys(p, "paths", {"registry", "index", "queries", "output"});
    for (auto [key, slot] : {std::pair{"registry", &c.paths.registry}, std::pair{"index", &c.paths.index},
                             std::pair{"queries", &c.paths.queries}, std::pair{"output", &c.paths.output}}) {
      std::string value;
      read(p, key, value, "paths");
      if (p.contains(key)) *slot = resolve(base_dir, value);
    }
  }
  if (j.contains("registry_counts")) {
    const auto& r = j["registry_counts"];
    check_keys(r, "registry_counts", {"labels", "clusters", "groups"});
    read(r, "labels", c.registry_counts.labels, "registry_counts");
    read(r, "clusters", c.registry_counts.clusters, "registry_counts");
    read(r, "groups", c.registry_counts.groups, "registry_counts");
  }
  if (j.contains("filter")) {
    const auto& f = j["filter"];
    check_keys(f, "filter", {"split", "cluster", "group", "limit"});
    if (f.contains("split")) {
      try {
        c.filter.split = parse_split(f["split"].get<std::string>());
      } catch (const std::exception& e) {
        throw ConfigError(std::string("filter.split: ") + e.what());
      }
      if (*c.filter.split == Split::unassigned) c.filter.split.reset();
    }
    if (f.contains("cluster")) c.filter.cluster = f["cluster"].get<std::string>();
    if (f.contains("group")) c.filter.group = f["group"].get<std::string>();
    if (f.contains("limit")) {
      std::int64_t limit = 0;
      read(f, "limit", limit, "filter");
      if (limit <= 0) throw ConfigError("filter.limit must be positive");
      c.filter.limit = static_cast<std::size_t>(limit);
    }
  }
  read(j, "snapshot_steps", c.snapshot_steps, "config");
  read(j, "workers", c.workers, "config");
  read(j, "query_seed", c.query_seed, "config");
  read(j, "split_seed", c.split_seed, "config");
  if (j.contains("evaluation")) {
    const auto& e = j["evaluation"];
    check_keys(e, "evaluation",
               {"classifier", "classifier_seed", "feature_dim", "feature_seed", "resolution", "alpha"});
    read(e, "classifier", c.evaluation.classifier, "evaluation");
    read(e, "classifier_seed", c.evaluation.classifier_seed, "evaluation");
    read(e, "feature_dim", c.evaluation.feature_dim, "evaluation");
    read(e, "feature_seed", c.evaluation.feature_seed, "evaluation");
    read(e, "resolution", c.evaluation.resolution, "evaluation");
    read(e, "alpha", c.evaluation.alpha, "evaluation");
  }
  c.validate();
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return config_from_json(j, path.parent_path());
}

void apply_override(nlohmann::json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' must look like key.path=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value;
  try {
    value = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception&) {
    value = text;
  }
  nlohmann::json* node = &j;
  std::size_t start = 0;
  while (true) {
    const auto dot = key.find('.', start);
    const std::string part = key.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (part.empty()) throw ConfigError("override '" + assignment + "' has an empty key segment");
    if (!node->is_object()) *node = nlohmann::json::object();
    if (dot == std::string::npos) {
      (*node)[part] = value;
      return;
    }
    node = &(*node)[part];
    start = dot + 1;
  }
}

std::string config_hash(const RunConfig& config) {
  auto j = to_json(config);
  j["paths"].erase("output");
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(j.dump())));
  return buf;
}

BackendSet create_backends(const RunConfig& config, const HyperParams& hp) {
  nlohmann::json options = config.backend;
  const std::string id = options.at("id").get<std::string>();
  options.erase("id");
  if (id == "surrogate") {
    if (!options.contains("encode_resolution")) options["encode_resolution"] = hp.encode_resolution;
    if (!options.contains("seed")) options["seed"] = hp.rng_seed;
  }
  try {
    return BackendRegistry::instance().create(id, options);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("backend '" + id + "': " + e.what());
  } catch (const InvalidArgument& e) {
    throw ConfigError("backend '" + id + "': " + e.what());
  }
}

}  // namespace flexit
