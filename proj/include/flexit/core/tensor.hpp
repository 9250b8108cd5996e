#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <type_traits>

#include "flexit/core/errors.hpp"

namespace flexit {

/// Planar C x H x W array. Element (c, y, x) lives at c*H*W + y*W + x, so each
/// channel plane is a contiguous row-major H x W block.
template <typename Scalar>
class Tensor3 {
  static_assert(std::is_floating_point_v<Scalar>, "Tensor3 needs a floating-point scalar");

 public:
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using PlaneMap = Eigen::Map<Vector>;
  using ConstPlaneMap = Eigen::Map<const Vector>;

  Tensor3() = default;
  Tensor3(int channels, int height, int width)
      : channels_(channels), height_(height), width_(width) {
    if (channels <= 0 || height <= 0 || width <= 0) {
      throw InvalidArgument("Tensor3 dimensions must be positive");
    }
    data_ = Vector::Zero(static_cast<Eigen::Index>(channels) * height * width);
  }
  Tensor3(int channels, int height, int width, Vector data)
      : channels_(channels), height_(height), width_(width), data_(std::move(data)) {
    if (channels <= 0 || height <= 0 || width <= 0) {
      throw InvalidArgument("Tensor3 dimensions must be positive");
    }
    if (data_.size() != static_cast<Eigen::Index>(channels) * height * width) {
      throw InvalidArgument("Tensor3 data size does not match its shape");
    }
  }

  static Tensor3 zeros_like(const Tensor3& other) {
    return Tensor3(other.channels_, other.height_, other.width_);
  }

  int channels() const noexcept { return channels_; }
  int height() const noexcept { return height_; }
  int width() const noexcept { return width_; }
  Eigen::Index plane_size() const noexcept { return static_cast<Eigen::Index>(height_) * width_; }
  Eigen::Index size() const noexcept { return data_.size(); }

  bool same_shape(const Tensor3& o) const noexcept {
    return channels_ == o.channels_ && height_ == o.height_ && width_ == o.width_;
  }

  Scalar& operator()(int c, int y, int x) { return data_[index(c, y, x)]; }
  Scalar operator()(int c, int y, int x) const { return data_[index(c, y, x)]; }

  PlaneMap plane(int c) { return PlaneMap(data_.data() + c * plane_size(), plane_size()); }
  ConstPlaneMap plane(int c) const {
    return ConstPlaneMap(data_.data() + c * plane_size(), plane_size());
  }

  /// Positions as rows, channels as columns: row p is the channel vector at
  /// spatial position p.
  Eigen::Map<const Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>> positions() const {
    return {data_.data(), plane_size(), channels_};
  }

  Vector& data() noexcept { return data_; }
  const Vector& data() const noexcept { return data_; }

  bool all_finite() const { return data_.allFinite(); }

  template <typename Other>
  Tensor3<Other> cast() const {
    return Tensor3<Other>(channels_, height_, width_, data_.template cast<Other>());
  }

  friend bool operator==(const Tensor3& a, const Tensor3& b) {
    return a.same_shape(b) && a.data_ == b.data_;
  }

 private:
  Eigen::Index index(int c, int y, int x) const {
    return (static_cast<Eigen::Index>(c) * height_ + y) * width_ + x;
  }

  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  Vector data_;
};

using Tensor = Tensor3<double>;

}  // namespace flexit
