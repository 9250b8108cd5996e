#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace flexit {

enum class LatentNorm { L1, L2, L21 };

std::string to_string(LatentNorm norm);
LatentNorm parse_latent_norm(std::string_view name);

/// Optimization settings. Defaults are the published configuration.
struct HyperParams {
  double lambda_image = 0.2;       // weight of the input-image embedding in P
  double lambda_source = 0.4;      // weight of the (subtracted) source-text embedding in P
  double lambda_perceptual = 0.15;
  double lambda_latent = 0.05;
  double step_size = 0.05;
  int steps = 160;
  int augmentations = 8;           // per ensemble member and step; 0 = raw image
  LatentNorm latent_norm = LatentNorm::L21;
  int encode_resolution = 288;
  int metric_resolution = 256;
  std::uint64_t rng_seed = 0;

  /// Throws InvalidArgument naming the first offending field.
  void validate() const;
};

}  // namespace flexit
