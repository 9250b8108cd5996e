#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "flexit/backends/interfaces.hpp"
#include "flexit/core/query.hpp"
#include "flexit/dataset/clusters.hpp"
#include "flexit/dataset/image_index.hpp"
#include "flexit/metrics/report.hpp"

namespace flexit {

enum class Baseline { copy, encode, retrieve };

std::string to_string(Baseline baseline);
Baseline parse_baseline(const std::string& text);

Image baseline_copy(const TransformQuery& query, const Image& input);
/// decode(encode(input)) at the autoencoder's native resolution.
Image baseline_encode(const TransformQuery& query, const Image& input, const Autoencoder& autoencoder);

/// Seeded uniform pick among the target label's validation images, skipping
/// the query's own input image when another candidate exists.
std::string retrieve_image_id(const TransformQuery& query, const ImageIndex& index, std::uint64_t seed);
Image baseline_retrieve(const TransformQuery& query, const ImageIndex& index, std::uint64_t seed);

/// Per-group CSFID and failure rate, bucketed by the registry group of each
/// record's target label.
std::vector<GroupMetrics> group_rollup(const ClusterRegistry& registry,
                                       const std::vector<QueryRecord>& records,
                                       const FeatureSet<double>& reference);

}  // namespace flexit
