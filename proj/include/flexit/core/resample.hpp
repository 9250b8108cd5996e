#pragma once

#include <Eigen/SparseCore>

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>
#include <vector>

#include "flexit/core/tensor.hpp"
#include "flexit/core/types.hpp"

namespace flexit {

/// Linear map between single-channel planes, applied identically to every
/// channel of a tensor. The adjoint is what gradients flow through.
class PlaneOperator {
 public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  PlaneOperator(int in_height, int in_width, int out_height, int out_width, Matrix matrix);
  PlaneOperator(const PlaneOperator&) = default;
  PlaneOperator& operator=(const PlaneOperator&) = default;
  // Swap-based so vectors of operators relocate without copying storage.
  PlaneOperator(PlaneOperator&& other) noexcept
      : in_h_(other.in_h_), in_w_(other.in_w_), out_h_(other.out_h_), out_w_(other.out_w_) {
    m_.swap(other.m_);
  }
  PlaneOperator& operator=(PlaneOperator&& other) noexcept {
    in_h_ = other.in_h_;
    in_w_ = other.in_w_;
    out_h_ = other.out_h_;
    out_w_ = other.out_w_;
    m_.swap(other.m_);
    return *this;
  }

  /// Bilinear resampler. `source_coords(y, x)` gives the continuous source
  /// position (row, col) of output pixel (y, x) in pixel-index units; taps
  /// outside the input are clamped to the nearest edge pixel.
  template <typename CoordFn>
  static PlaneOperator bilinear(int in_height, int in_width, int out_height, int out_width,
                                CoordFn&& source_coords);

  int in_height() const noexcept { return in_h_; }
  int in_width() const noexcept { return in_w_; }
  int out_height() const noexcept { return out_h_; }
  int out_width() const noexcept { return out_w_; }
  const Matrix& matrix() const noexcept { return m_; }

  Tensor apply(const Tensor& input) const;
  Tensor apply_adjoint(const Tensor& output_grad) const;

 private:
  int in_h_, in_w_, out_h_, out_w_;
  Matrix m_;
};

/// Separable linear map X -> R * X * C^T on every channel plane, with R of
/// size out_h x in_h and C of size out_w x in_w.
class SeparableOperator {
 public:
  using Matrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

  SeparableOperator(Matrix rows, Matrix cols);

  int in_height() const noexcept { return static_cast<int>(rows_.cols()); }
  int in_width() const noexcept { return static_cast<int>(cols_.cols()); }
  int out_height() const noexcept { return static_cast<int>(rows_.rows()); }
  int out_width() const noexcept { return static_cast<int>(cols_.rows()); }

  Tensor apply(const Tensor& input) const;
  Tensor apply_adjoint(const Tensor& output_grad) const;

 private:
  Matrix rows_;
  Matrix cols_;
};

/// 1-D bilinear interpolation matrix (out x in), half-pixel centres, edge clamp.
SeparableOperator::Matrix bilinear_axis(int in_size, int out_size);

/// Sequence of plane operators applied left to right.
class SamplingChain {
 public:
  void push_back(PlaneOperator op);
  bool empty() const noexcept { return ops_.empty(); }
  std::size_t size() const noexcept { return ops_.size(); }

  Tensor apply(const Tensor& input) const;
  Tensor apply_adjoint(const Tensor& output_grad) const;

 private:
  std::vector<PlaneOperator> ops_;
};

/// Bilinear resize with half-pixel centres (align_corners = false):
/// source = (dst + 0.5) * in / out - 0.5, clamped to the edge.
SeparableOperator resize_operator(int in_height, int in_width, int out_height, int out_width);

/// Resizes every channel. Same-size resize returns the input unchanged.
Tensor resize(const Tensor& input, int height, int width);

/// Bilinear resize of an image; the output is clamped to [0, 1].
Image resize(const Image& image, int height, int width);

template <typename CoordFn>
PlaneOperator PlaneOperator::bilinear(int in_height, int in_width, int out_height, int out_width,
                                      CoordFn&& source_coords) {
  const Eigen::Index rows = static_cast<Eigen::Index>(out_height) * out_width;
  const Eigen::Index cols = static_cast<Eigen::Index>(in_height) * in_width;
  // Compressed row storage is filled in place; every row has at most 4 taps.
  PlaneOperator op(in_height, in_width, out_height, out_width, Matrix(rows, cols));
  Matrix& m = op.m_;
  m.resizeNonZeros(rows * 4);
  int* outer = m.outerIndexPtr();
  int* inner = m.innerIndexPtr();
  double* values = m.valuePtr();
  int nnz = 0;
  outer[0] = 0;
  for (int y = 0; y < out_height; ++y) {
    for (int x = 0; x < out_width; ++x) {
      const auto [sy, sx] = source_coords(y, x);
      const double fy = std::floor(sy);
      const double fx = std::floor(sx);
      const double wy = sy - fy;
      const double wx = sx - fx;
      const int y0 = std::clamp(static_cast<int>(fy), 0, in_height - 1);
      const int y1 = std::clamp(static_cast<int>(fy) + 1, 0, in_height - 1);
      const int x0 = std::clamp(static_cast<int>(fx), 0, in_width - 1);
      const int x1 = std::clamp(static_cast<int>(fx) + 1, 0, in_width - 1);
      std::array<std::pair<int, double>, 4> taps{{
          {y0 * in_width + x0, (1 - wy) * (1 - wx)},
          {y0 * in_width + x1, (1 - wy) * wx},
          {y1 * in_width + x0, wy * (1 - wx)},
          {y1 * in_width + x1, wy * wx},
      }};
      std::sort(taps.begin(), taps.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
      const int row_start = nnz;
      for (const auto& [col, w] : taps) {
        if (w == 0.0) continue;
        // Taps that clamp onto the same pixel are merged.
        if (nnz > row_start && inner[nnz - 1] == col) {
          values[nnz - 1] += w;
        } else {
          inner[nnz] = col;
          values[nnz] = w;
          ++nnz;
        }
      }
      outer[static_cast<Eigen::Index>(y) * out_width + x + 1] = nnz;
    }
  }
  m.resizeNonZeros(nnz);
  return op;
}

}  // namespace flexit
