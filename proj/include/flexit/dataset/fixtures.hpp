#pragma once

#include <cstdint>
#include <filesystem>

#include "flexit/dataset/clusters.hpp"
#include "flexit/dataset/image_index.hpp"

namespace flexit {

/// Desk-scale stand-in for the image corpus. Each label gets a smooth
/// prototype (a coarse random colour grid, bilinearly upsampled); samples are
/// the prototype plus Gaussian pixel noise, clamped and stored as PNG.
struct FixtureOptions {
  int resolution = 32;
  int grid = 4;
  int val_per_label = 3;
  int train_per_label = 4;
  double noise = 0.04;
  std::uint64_t seed = 0;

  void validate() const;
};

Image fixture_prototype(const std::string& label, const FixtureOptions& options);
Image fixture_sample(const std::string& label, const std::string& split, int k,
                     const FixtureOptions& options);

/// Writes val/, train/, prototypes/ and index.json under `dir`; returns the
/// loaded index.
ImageIndex generate_fixtures(const ClusterRegistry& registry, const std::filesystem::path& dir,
                             const FixtureOptions& options);

}  // namespace flexit
