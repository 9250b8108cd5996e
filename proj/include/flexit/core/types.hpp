#pragma once

#include <Eigen/Dense>

#include <array>
#include <string>
#include <utility>

#include "flexit/core/tensor.hpp"

namespace flexit {

inline constexpr int kMinImageSide = 8;

/// RGB image with pixels in [0, 1]. Construction validates the range; use
/// Image::clamped for values produced by interpolation or decoding.
class Image {
 public:
  Image() = default;
  explicit Image(Tensor pixels);

  /// Clamps every value into [0, 1] (NaN becomes an error).
  static Image clamped(Tensor pixels);
  static Image filled(int height, int width, double value);

  int height() const noexcept { return pixels_.height(); }
  int width() const noexcept { return pixels_.width(); }
  const Tensor& pixels() const noexcept { return pixels_; }
  double operator()(int c, int y, int x) const { return pixels_(c, y, x); }

  friend bool operator==(const Image& a, const Image& b) { return a.pixels_ == b.pixels_; }

 private:
  Tensor pixels_;
};

struct LatentShape {
  int channels = 0;
  int height = 0;
  int width = 0;

  Eigen::Index size() const { return static_cast<Eigen::Index>(channels) * height * width; }
  friend bool operator==(const LatentShape&, const LatentShape&) = default;
};

std::string to_string(const LatentShape& shape);

/// Latent grid z (channels x H_l x W_l). Values must be finite.
class LatentCode {
 public:
  LatentCode() = default;
  explicit LatentCode(Tensor values);

  LatentShape shape() const { return {values_.channels(), values_.height(), values_.width()}; }
  const Tensor& values() const noexcept { return values_; }

  friend bool operator==(const LatentCode& a, const LatentCode& b) { return a.values_ == b.values_; }

 private:
  Tensor values_;
};

struct EmbeddingVector {
  Eigen::VectorXd values;
  std::string provenance;

  Eigen::Index dim() const { return values.size(); }
};

/// Target point P in the concatenated embedding space.
struct TargetPoint {
  Eigen::VectorXd values;

  Eigen::Index dim() const { return values.size(); }
};

}  // namespace flexit
