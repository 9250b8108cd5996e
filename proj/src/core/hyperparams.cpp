#include "flexit/core/hyperparams.hpp"

#include <cmath>

#include "flexit/core/errors.hpp"
#include "flexit/core/types.hpp"

namespace flexit {

std::string to_string(LatentNorm norm) {
  switch (norm) {
    case LatentNorm::L1: return "L1";
    case LatentNorm::L2: return "L2";
    case LatentNorm::L21: return "L21";
  }
  return "?";
}

LatentNorm parse_latent_norm(std::string_view name) {
  if (name == "L1" || name == "l1") return LatentNorm::L1;
  if (name == "L2" || name == "l2") return LatentNorm::L2;
  if (name == "L21" || name == "l21" || name == "L2,1") return LatentNorm::L21;
  throw InvalidArgument("unknown latent norm '" + std::string(name) + "' (expected L1, L2 or L21)");
}

void HyperParams::validate() const {
  auto non_negative = [](double v, const char* name) {
    if (!std::isfinite(v) || v < 0) {
      throw InvalidArgument(std::string(name) + " must be a finite non-negative number");
    }
  };
  non_negative(lambda_image, "lambda_image");
  non_negative(lambda_source, "lambda_source");
  non_negative(lambda_perceptual, "lambda_perceptual");
  non_negative(lambda_latent, "lambda_latent");
  if (!std::isfinite(step_size) || step_size <= 0) {
    throw InvalidArgument("step_size must be positive");
  }
  if (steps < 0) throw InvalidArgument("steps must be non-negative");
  if (augmentations < 0) throw InvalidArgument("augmentations must be non-negative");
  if (encode_resolution < kMinImageSide) {
    throw InvalidArgument("encode_resolution must be at least " + std::to_string(kMinImageSide));
  }
  if (metric_resolution < kMinImageSide) {
    throw InvalidArgument("metric_resolution must be at least " + std::to_string(kMinImageSide));
  }
}

}  // namespace flexit
