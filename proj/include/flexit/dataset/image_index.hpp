#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "flexit/core/types.hpp"
#include "flexit/dataset/clusters.hpp"

namespace flexit {

/// label -> image ids (paths relative to root). `val` feeds queries and the
/// Retrieve baseline, `train` is the CSFID reference. `prototypes` is only
/// set for synthetic fixture corpora.
struct ImageIndex {
  std::filesystem::path root;
  std::map<std::string, std::vector<std::string>> val;
  std::map<std::string, std::vector<std::string>> train;
  std::map<std::string, std::string> prototypes;

  const std::vector<std::string>& val_images(const std::string& label) const;
  std::filesystem::path resolve(const std::string& image_id) const { return root / image_id; }
  Image load(const std::string& image_id) const;

  /// Every registry label has at least one validation image.
  void require_validation_images(const ClusterRegistry& registry) const;
};

/// JSON layout: {"val": {label: [path...]}, "train": {...}, "prototypes": {label: path}}.
/// Paths are relative to the index file's directory.
ImageIndex load_image_index(const std::filesystem::path& path);
void write_image_index(const std::filesystem::path& path, const ImageIndex& index);

}  // namespace flexit
