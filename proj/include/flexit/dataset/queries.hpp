#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "flexit/core/query.hpp"
#include "flexit/dataset/clusters.hpp"
#include "flexit/dataset/image_index.hpp"

namespace flexit {

inline constexpr int kSourcesPerTarget = 8;

enum class Split { unassigned, dev, test };

std::string to_string(Split split);
Split parse_split(const std::string& text);

struct QuerySet {
  std::vector<TransformQuery> queries;
  std::vector<Split> splits;  // parallel to queries
  std::uint64_t seed = 0;

  std::size_t size() const { return queries.size(); }
  std::size_t count(Split split) const;
};

/// For every target label, kSourcesPerTarget source labels from the rest of
/// its cluster (with replacement when the cluster has fewer than
/// kSourcesPerTarget + 1 labels), each paired with a validation image of the
/// source label. Images repeat only once a source's pool is exhausted.
QuerySet build_queries(const ClusterRegistry& registry, const ImageIndex& index, std::uint64_t seed);

/// Shuffles and tags the first half dev, the rest test. Query order is kept.
QuerySet split_dev_test(const QuerySet& set, std::uint64_t seed);

struct QueryFilter {
  std::optional<Split> split;
  std::optional<std::string> cluster;
  std::optional<std::string> group;
  std::optional<std::size_t> limit;
};

QuerySet filter_queries(const QuerySet& set, const QueryFilter& filter, const ClusterRegistry& registry);

void write_queries_jsonl(std::ostream& out, const QuerySet& set);
void write_queries_jsonl(const std::filesystem::path& path, const QuerySet& set);
QuerySet read_queries_jsonl(std::istream& in);
QuerySet read_queries_jsonl(const std::filesystem::path& path);

}  // namespace flexit
