#include "flexit/dataset/clusters.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "flexit/core/errors.hpp"

namespace flexit {

ClusterRegistry::ClusterRegistry(std::vector<ClusterEntry> entries) : entries_(std::move(entries)) {
  std::set<std::string> cluster_names;
  for (std::size_t e = 0; e < entries_.size(); ++e) {
    const auto& entry = entries_[e];
    const std::string where = "cluster '" + entry.cluster + "'";
    if (entry.cluster.empty()) throw SchemaError("entry " + std::to_string(e) + ": empty cluster name");
    if (entry.group.empty()) throw SchemaError(where + ": empty group name");
    if (entry.labels.empty()) throw SchemaError(where + ": empty cluster");
    if (entry.labels.size() < 2) throw SchemaError(where + ": needs at least 2 labels");
    if (!cluster_names.insert(entry.cluster).second) throw SchemaError(where + ": duplicate cluster");
    for (const auto& label : entry.labels) {
      if (label.empty()) throw SchemaError(where + ": empty label");
      if (label_entry_.count(label)) {
        throw SchemaError("label '" + label + "' appears in " + where + " and cluster '" +
                          entries_[label_entry_.at(label)].cluster + "'");
      }
      label_entry_[label] = e;
      label_index_[label] = static_cast<int>(labels_.size());
      labels_.push_back(label);
    }
  }
}

std::vector<std::string> ClusterRegistry::groups() const {
  std::vector<std::string> out;
  for (const auto& e : entries_) {
    if (std::find(out.begin(), out.end(), e.group) == out.end()) out.push_back(e.group);
  }
  return out;
}

const ClusterEntry& ClusterRegistry::entry_of(const std::string& label) const {
  const auto it = label_entry_.find(label);
  if (it == label_entry_.end()) throw SchemaError("unknown label '" + label + "'");
  return entries_[it->second];
}

int ClusterRegistry::label_index(const std::string& label) const {
  const auto it = label_index_.find(label);
  if (it == label_index_.end()) throw SchemaError("unknown label '" + label + "'");
  return it->second;
}

std::map<std::string, std::string> ClusterRegistry::label_group() const {
  std::map<std::string, std::string> out;
  for (const auto& e : entries_) {
    for (const auto& l : e.labels) out[l] = e.group;
  }
  return out;
}

RegistryCounts ClusterRegistry::counts() const {
  return {labels_.size(), entries_.size(), groups().size()};
}

ClusterRegistry parse_clusters(const nlohmann::json& j, const RegistryCounts& expected) {
  if (!j.is_array()) throw SchemaError("cluster registry must be a JSON array");
  std::vector<ClusterEntry> entries;
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& item = j[i];
    const std::string where = "registry entry " + std::to_string(i);
    if (!item.is_object()) throw SchemaError(where + ": not an object");
    for (const char* key : {"group", "cluster", "labels"}) {
      if (!item.contains(key)) throw SchemaError(where + ": missing '" + key + "'");
    }
    if (!item["group"].is_string() || !item["cluster"].is_string() || !item["labels"].is_array()) {
      throw SchemaError(where + ": wrong field types");
    }
    ClusterEntry entry;
    entry.group = item["group"].get<std::string>();
    entry.cluster = item["cluster"].get<std::string>();
    for (const auto& l : item["labels"]) {
      if (!l.is_string()) throw SchemaError(where + ": non-string label");
      entry.labels.push_back(l.get<std::string>());
    }
    if (item.contains("note")) entry.note = item["note"].get<std::string>();
    entries.push_back(std::move(entry));
  }
  ClusterRegistry reg(std::move(entries));
  const auto c = reg.counts();
  if (c.labels != expected.labels || c.clusters != expected.clusters || c.groups != expected.groups) {
    throw SchemaError("registry count mismatch: got " + std::to_string(c.labels) + " labels / " +
                      std::to_string(c.clusters) + " clusters / " + std::to_string(c.groups) +
                      " groups, expected " + std::to_string(expected.labels) + " / " +
                      std::to_string(expected.clusters) + " / " + std::to_string(expected.groups));
  }
  return reg;
}

ClusterRegistry load_clusters(const std::filesystem::path& path, const RegistryCounts& expected) {
  std::ifstream in(path);
  if (!in) throw MissingData("cannot open registry " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  return parse_clusters(j, expected);
}

ClusterRegistry load_clusters(const std::filesystem::path& path) {
  return load_clusters(path, RegistryCounts{});
}

nlohmann::json to_json(const ClusterRegistry& registry) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& e : registry.entries()) {
    nlohmann::json item{{"group", e.group}, {"cluster", e.cluster}, {"labels", e.labels}};
    if (!e.note.empty()) item["note"] = e.note;
    out.push_back(std::move(item));
  }
  return out;
}

}  // namespace flexit
