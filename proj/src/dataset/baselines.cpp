#include "flexit/dataset/baselines.hpp"

#include "flexit/core/errors.hpp"
#include "flexit/core/random.hpp"

namespace flexit {

std::string to_string(Baseline baseline) {
  switch (baseline) {
    case Baseline::copy: return "copy";
    case Baseline::encode: return "encode";
    case Baseline::retrieve: return "retrieve";
  }
  return "?";
}

Baseline parse_baseline(const std::string& text) {
  if (text == "copy") return Baseline::copy;
  if (text == "encode") return Baseline::encode;
  if (text == "retrieve") return Baseline::retrieve;
  throw InvalidArgument("unknown baseline '" + text + "' (copy, encode, retrieve)");
}

Image baseline_copy(const TransformQuery&, const Image& input) { return input; }

Image baseline_encode(const TransformQuery&, const Image& input, const Autoencoder& autoencoder) {
  return autoencoder.decode(autoencoder.encode(input));
}

std::string retrieve_image_id(const TransformQuery& query, const ImageIndex& index, std::uint64_t seed) {
  std::vector<std::string> pool;
  for (const auto& id : index.val_images(query.target_label)) {
    if (id != query.image_id) pool.push_back(id);
  }
  if (pool.empty()) pool.push_back(query.image_id);
  Rng rng = make_rng({seed, fnv1a64(query.id), 0x4e7u});
  return pool[uniform_index(rng, pool.size())];
}

Image baseline_retrieve(const TransformQuery& query, const ImageIndex& index, std::uint64_t seed) {
  return index.load(retrieve_image_id(query, index, seed));
}

std::vector<GroupMetrics> group_rollup(const ClusterRegistry& registry,
                                       const std::vector<QueryRecord>& records,
                                       const FeatureSet<double>& reference) {
  return rollup_by_group(records, reference, registry.label_group());
}

}  // namespace flexit
