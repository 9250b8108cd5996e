#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace flexit {

struct ClusterEntry {
  std::string group;
  std::string cluster;
  std::vector<std::string> labels;
  std::string note;  // free-form transcription remark, may be empty
};

struct RegistryCounts {
  std::size_t labels = 273;
  std::size_t clusters = 47;
  std::size_t groups = 13;
};

/// Labels grouped into clusters, clusters into groups. Immutable after load.
class ClusterRegistry {
 public:
  ClusterRegistry() = default;
  /// Validates structure only (no count check).
  explicit ClusterRegistry(std::vector<ClusterEntry> entries);

  const std::vector<ClusterEntry>& entries() const noexcept { return entries_; }
  /// All labels in table order.
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::vector<std::string> groups() const;

  bool contains(const std::string& label) const { return label_entry_.count(label) > 0; }
  const ClusterEntry& entry_of(const std::string& label) const;
  const std::string& cluster_of(const std::string& label) const { return entry_of(label).cluster; }
  const std::string& group_of(const std::string& label) const { return entry_of(label).group; }
  /// Position of `label` in labels().
  int label_index(const std::string& label) const;
  std::map<std::string, std::string> label_group() const;

  RegistryCounts counts() const;

 private:
  std::vector<ClusterEntry> entries_;
  std::vector<std::string> labels_;
  std::map<std::string, std::size_t> label_entry_;
  std::map<std::string, int> label_index_;
};

ClusterRegistry parse_clusters(const nlohmann::json& j, const RegistryCounts& expected);
ClusterRegistry load_clusters(const std::filesystem::path& path, const RegistryCounts& expected);
/// Loads and asserts the full 273 / 47 / 13 table.
ClusterRegistry load_clusters(const std::filesystem::path& path);

nlohmann::json to_json(const ClusterRegistry& registry);

}  // namespace flexit
