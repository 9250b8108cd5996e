#include "flexit/dataset/fixtures.hpp"

#include <cctype>
#include <cstdio>

#include "flexit/core/errors.hpp"
#include "flexit/core/png_io.hpp"
#include "flexit/core/random.hpp"
#include "flexit/core/resample.hpp"

namespace flexit {

void FixtureOptions::validate() const {
  if (resolution < kMinImageSide) throw InvalidArgument("fixture resolution must be >= 8");
  if (grid < 1 || grid > resolution) throw InvalidArgument("fixture grid must be in [1, resolution]");
  if (val_per_label < 1) throw InvalidArgument("need at least one validation image per label");
  if (train_per_label < 1) throw InvalidArgument("need at least one training image per label");
  if (!(noise >= 0.0)) throw InvalidArgument("fixture noise must be >= 0");
}

Image fixture_prototype(const std::string& label, const FixtureOptions& options) {
  Rng rng = make_rng({options.seed, fnv1a64(label), 0x9707u});
  Tensor coarse(3, options.grid, options.grid);
  for (Eigen::Index i = 0; i < coarse.size(); ++i) coarse.data()[i] = uniform(rng, 0.05, 0.95);
  return Image::clamped(resize(coarse, options.resolution, options.resolution));
}

Image fixture_sample(const std::string& label, const std::string& split, int k,
                     const FixtureOptions& options) {
  Tensor pixels = fixture_prototype(label, options).pixels();
  Rng rng = make_rng({options.seed, fnv1a64(label), fnv1a64(split), static_cast<std::uint64_t>(k)});
  for (Eigen::Index i = 0; i < pixels.size(); ++i) pixels.data()[i] += options.noise * standard_normal(rng);
  return Image::clamped(std::move(pixels));
}

namespace {

std::string slug(int index, const std::string& label) {
  char prefix[8];
  std::snprintf(prefix, sizeof prefix, "%03d_", index);
  std::string out = prefix;
  for (unsigned char c : label) out += std::isalnum(c) ? static_cast<char>(std::tolower(c)) : '_';
  return out;
}

}  // namespace

ImageIndex generate_fixtures(const ClusterRegistry& registry, const std::filesystem::path& dir,
                             const FixtureOptions& options) {
  options.validate();
  ImageIndex index;
  index.root = dir;
  const auto& labels = registry.labels();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const auto& label = labels[i];
    const std::string name = slug(static_cast<int>(i), label);
    const std::string proto = "prototypes/" + name + ".png";
    write_png(dir / proto, fixture_prototype(label, options));
    index.prototypes[label] = proto;
    for (int k = 0; k < options.val_per_label; ++k) {
      const std::string id = "val/" + name + "/" + std::to_string(k) + ".png";
      write_png(dir / id, fixture_sample(label, "val", k, options));
      index.val[label].push_back(id);
    }
    for (int k = 0; k < options.train_per_label; ++k) {
      const std::string id = "train/" + name + "/" + std::to_string(k) + ".png";
      write_png(dir / id, fixture_sample(label, "train", k, options));
      index.train[label].push_back(id);
    }
  }
  write_image_index(dir / "index.json", index);
  return index;
}

}  // namespace flexit
