#pragma once

#include <nlohmann/json.hpp>

#include <functional>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "flexit/backends/interfaces.hpp"

namespace flexit {

/// Named factories for backend sets. "surrogate" is always registered;
/// adapters around real models register under their own id and read their
/// settings from the "backend" object of the run config.
class BackendRegistry {
 public:
  using Factory = std::function<BackendSet(const nlohmann::json& config)>;

  static BackendRegistry& instance();

  void add(const std::string& id, Factory factory);
  bool contains(const std::string& id) const;
  std::vector<std::string> ids() const;
  BackendSet create(const std::string& id, const nlohmann::json& config) const;

 private:
  BackendRegistry();

  mutable std::mutex mutex_;
  std::map<std::string, Factory> factories_;
};

}  // namespace flexit
