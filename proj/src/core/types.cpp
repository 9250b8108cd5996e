#include "flexit/core/types.hpp"

#include <cmath>

namespace flexit {

namespace {

void check_image_shape(const Tensor& t) {
  if (t.channels() != 3) throw InvalidArgument("Image must have 3 channels");
  if (t.height() < kMinImageSide || t.width() < kMinImageSide) {
    throw InvalidArgument("Image sides must be at least " + std::to_string(kMinImageSide) +
                          ", got " + std::to_string(t.height()) + "x" +
                          std::to_string(t.width()));
  }
}

}  // namespace

Image::Image(Tensor pixels) : pixels_(std::move(pixels)) {
  check_image_shape(pixels_);
  const auto& d = pixels_.data();
  if (!d.allFinite() || d.minCoeff() < 0.0 || d.maxCoeff() > 1.0) {
    throw InvalidArgument("Image pixel values must lie in [0, 1]");
  }
}

Image Image::clamped(Tensor pixels) {
  check_image_shape(pixels);
  if (pixels.data().hasNaN()) throw InvalidArgument("Image pixels contain NaN");
  pixels.data() = pixels.data().cwiseMax(0.0).cwiseMin(1.0);
  return Image(std::move(pixels));
}

Image Image::filled(int height, int width, double value) {
  Tensor t(3, height, width);
  t.data().setConstant(value);
  return Image(std::move(t));
}

std::string to_string(const LatentShape& shape) {
  return "(" + std::to_string(shape.channels) + ", " + std::to_string(shape.height) + ", " +
         std::to_string(shape.width) + ")";
}

LatentCode::LatentCode(Tensor values) : values_(std::move(values)) {
  if (!values_.all_finite()) throw InvalidArgument("LatentCode values must be finite");
}

}  // namespace flexit
