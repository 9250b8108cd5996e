#pragma once

#include <cstdint>

#include "flexit/core/resample.hpp"
#include "flexit/core/types.hpp"

namespace flexit {

/// Random flip, rotation and crop applied to embedder inputs. Ranges are
/// validated against the published recipe: |rotation| <= 10 degrees, crops
/// keep at least 80% of the area, aspect ratio within [0.9, 1.1].
struct AugmentationSpec {
  double flip_prob = 0.5;
  double max_rotation_deg = 10.0;
  double min_area_fraction = 0.8;
  double min_aspect = 0.9;
  double max_aspect = 1.1;
  std::uint64_t seed = 0;

  static AugmentationSpec identity(std::uint64_t seed = 0);
  void validate() const;
};

struct AugmentationParams {
  bool flip = false;
  double rotation_deg = 0.0;
  double area_fraction = 1.0;  // fraction of the input area kept by the crop
  double aspect = 1.0;         // crop width / height relative to the input's
  double crop_top = 0.0;
  double crop_left = 0.0;
  double crop_height = 0.0;
  double crop_width = 0.0;
};

/// Parameters for one draw. Pure function of (spec.seed, draw_index).
AugmentationParams sample_augmentation(const AugmentationSpec& spec, int height, int width,
                                       std::uint64_t draw_index);

/// Flip, then rotate about the centre, then crop and resize back to
/// height x width, as a single bilinear resample with edge replication.
/// Empty when every stage is the identity.
SamplingChain augmentation_chain(const AugmentationParams& params, int height, int width);

Image augment(const Image& image, const AugmentationSpec& spec, std::uint64_t draw_index);

}  // namespace flexit
