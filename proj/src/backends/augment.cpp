#include "flexit/backends/augment.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "flexit/core/errors.hpp"
#include "flexit/core/random.hpp"

namespace flexit {

AugmentationSpec AugmentationSpec::identity(std::uint64_t seed) {
  AugmentationSpec s;
  s.flip_prob = 0.0;
  s.max_rotation_deg = 0.0;
  s.min_area_fraction = 1.0;
  s.min_aspect = 1.0;
  s.max_aspect = 1.0;
  s.seed = seed;
  return s;
}

void AugmentationSpec::validate() const {
  if (!(flip_prob >= 0.0 && flip_prob <= 1.0)) {
    throw InvalidArgument("flip_prob must be in [0, 1]");
  }
  if (!(max_rotation_deg >= 0.0 && max_rotation_deg <= 10.0)) {
    throw InvalidArgument("max_rotation_deg must be in [0, 10]");
  }
  if (!(min_area_fraction >= 0.8 && min_area_fraction <= 1.0)) {
    throw InvalidArgument("min_area_fraction must be in [0.8, 1]");
  }
  if (!(min_aspect >= 0.9 && max_aspect <= 1.1 && min_aspect <= max_aspect)) {
    throw InvalidArgument("aspect range must lie within [0.9, 1.1]");
  }
}

AugmentationParams sample_augmentation(const AugmentationSpec& spec, int height, int width,
                                       std::uint64_t draw_index) {
  Rng rng = make_rng({spec.seed, draw_index});
  AugmentationParams p;
  p.flip = uniform(rng, 0.0, 1.0) < spec.flip_prob;
  p.rotation_deg = uniform(rng, -spec.max_rotation_deg, spec.max_rotation_deg);
  p.area_fraction = uniform(rng, spec.min_area_fraction, 1.0);
  p.aspect = uniform(rng, spec.min_aspect, spec.max_aspect);
  if (spec.min_area_fraction == 1.0) p.area_fraction = 1.0;
  if (spec.min_aspect == spec.max_aspect) p.aspect = spec.min_aspect;

  // A side that would exceed the image is clipped; the kept area then stays
  // >= sqrt(min_area / max_aspect) > min_area.
  const double rel_w = std::min(1.0, std::sqrt(p.area_fraction * p.aspect));
  const double rel_h = std::min(1.0, std::sqrt(p.area_fraction / p.aspect));
  p.crop_width = rel_w * width;
  p.crop_height = rel_h * height;
  p.area_fraction = rel_w * rel_h;
  p.crop_left = uniform(rng, 0.0, width - p.crop_width);
  p.crop_top = uniform(rng, 0.0, height - p.crop_height);
  return p;
}

SamplingChain augmentation_chain(const AugmentationParams& p, int height, int width) {
  SamplingChain chain;
  const bool full_crop = p.crop_top == 0.0 && p.crop_left == 0.0 &&
                         p.crop_height == height && p.crop_width == width;
  if (!p.flip && p.rotation_deg == 0.0 && full_crop) return chain;
  const double theta = p.rotation_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  const double cy = height / 2.0;
  const double cx = width / 2.0;
  const double scale_y = p.crop_height / height;
  const double scale_x = p.crop_width / width;
  // The three stages are composed as one coordinate map (output -> crop ->
  // inverse rotation -> flip), so each draw resamples the image once.
  chain.push_back(PlaneOperator::bilinear(height, width, height, width, [&](int y, int x) {
    const double ry = p.crop_top + (y + 0.5) * scale_y;
    const double rx = p.crop_left + (x + 0.5) * scale_x;
    const double dy = ry - cy;
    const double dx = rx - cx;
    const double fy = cy + (-s * dx + c * dy) - 0.5;
    const double fx = cx + (c * dx + s * dy) - 0.5;
    return std::pair{fy, p.flip ? width - 1 - fx : fx};
  }));
  return chain;
}

Image augment(const Image& image, const AugmentationSpec& spec, std::uint64_t draw_index) {
  spec.validate();
  const auto params = sample_augmentation(spec, image.height(), image.width(), draw_index);
  const auto chain = augmentation_chain(params, image.height(), image.width());
  if (chain.empty()) return image;
  return Image::clamped(chain.apply(image.pixels()));
}

}  // namespace flexit
