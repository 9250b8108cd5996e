#include "flexit/backends/registry.hpp"

#include "flexit/backends/surrogates.hpp"
#include "flexit/core/errors.hpp"

namespace flexit {

namespace {

BackendSet make_surrogates(const nlohmann::json& config) {
  SurrogateOptions opts;
  opts.member_dims = config.value("member_dims", opts.member_dims);
  opts.member_resolution = config.value("member_resolution", opts.member_resolution);
  opts.encode_resolution = config.value("encode_resolution", opts.encode_resolution);
  const auto ae = config.value("autoencoder", std::string("avgpool"));
  if (ae == "identity") {
    opts.autoencoder = SurrogateAutoencoderKind::Identity;
  } else if (ae == "avgpool") {
    opts.autoencoder = SurrogateAutoencoderKind::AvgPool;
  } else {
    throw ConfigError("unknown surrogate autoencoder '" + ae + "' (expected identity or avgpool)");
  }
  return surrogate_suite(config.value("seed", std::uint64_t{0}), opts);
}

}  // namespace

BackendRegistry::BackendRegistry() { factories_["surrogate"] = make_surrogates; }

BackendRegistry& BackendRegistry::instance() {
  static BackendRegistry registry;
  return registry;
}

void BackendRegistry::add(const std::string& id, Factory factory) {
  std::lock_guard lock(mutex_);
  factories_[id] = std::move(factory);
}

bool BackendRegistry::contains(const std::string& id) const {
  std::lock_guard lock(mutex_);
  return factories_.count(id) > 0;
}

std::vector<std::string> BackendRegistry::ids() const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> out;
  for (const auto& [id, f] : factories_) out.push_back(id);
  return out;
}

BackendSet BackendRegistry::create(const std::string& id, const nlohmann::json& config) const {
  Factory factory;
  {
    std::lock_guard lock(mutex_);
    const auto it = factories_.find(id);
    if (it == factories_.end()) throw ConfigError("unknown backend '" + id + "'");
    factory = it->second;
  }
  auto set = factory(config);
  if (set.image_embedders.empty() || set.text_encoders.size() != set.image_embedders.size() ||
      !set.autoencoder || !set.optimization_distance || !set.evaluation_distance) {
    throw ConfigError("backend '" + id + "' returned an incomplete backend set");
  }
  if (set.optimization_distance->feature_seed() == set.evaluation_distance->feature_seed()) {
    throw ConfigError("backend '" + id +
                      "': optimization and evaluation perceptual distances share features");
  }
  return set;
}

}  // namespace flexit
