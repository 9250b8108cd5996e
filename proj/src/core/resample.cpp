#include "flexit/core/resample.hpp"

#include <algorithm>
#include <cmath>

namespace flexit {

PlaneOperator::PlaneOperator(int in_height, int in_width, int out_height, int out_width,
                             Matrix matrix)
    : in_h_(in_height), in_w_(in_width), out_h_(out_height), out_w_(out_width) {
  m_.swap(matrix);
  if (m_.rows() != static_cast<Eigen::Index>(out_h_) * out_w_ ||
      m_.cols() != static_cast<Eigen::Index>(in_h_) * in_w_) {
    throw InvalidArgument("PlaneOperator matrix does not match plane sizes");
  }
}

Tensor PlaneOperator::apply(const Tensor& input) const {
  if (input.height() != in_h_ || input.width() != in_w_) {
    throw InvalidArgument("PlaneOperator::apply: input plane size mismatch");
  }
  Eigen::MatrixXd planes = m_ * input.positions();
  return Tensor(input.channels(), out_h_, out_w_, planes.reshaped());
}

Tensor PlaneOperator::apply_adjoint(const Tensor& output_grad) const {
  if (output_grad.height() != out_h_ || output_grad.width() != out_w_) {
    throw InvalidArgument("PlaneOperator::apply_adjoint: gradient plane size mismatch");
  }
  Eigen::MatrixXd planes = m_.transpose() * output_grad.positions();
  return Tensor(output_grad.channels(), in_h_, in_w_, planes.reshaped());
}

void SamplingChain::push_back(PlaneOperator op) {
  if (!ops_.empty() &&
      (ops_.back().out_height() != op.in_height() || ops_.back().out_width() != op.in_width())) {
    throw InvalidArgument("SamplingChain: operator sizes do not chain");
  }
  ops_.push_back(std::move(op));
}

Tensor SamplingChain::apply(const Tensor& input) const {
  Tensor t = input;
  for (const auto& op : ops_) t = op.apply(t);
  return t;
}

Tensor SamplingChain::apply_adjoint(const Tensor& output_grad) const {
  Tensor g = output_grad;
  for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) g = it->apply_adjoint(g);
  return g;
}

SeparableOperator::SeparableOperator(Matrix rows, Matrix cols)
    : rows_(std::move(rows)), cols_(std::move(cols)) {}

namespace {

using RowMajorPlane = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

Tensor SeparableOperator::apply(const Tensor& input) const {
  if (input.height() != in_height() || input.width() != in_width()) {
    throw InvalidArgument("SeparableOperator::apply: input plane size mismatch");
  }
  Tensor out(input.channels(), out_height(), out_width());
  for (int c = 0; c < input.channels(); ++c) {
    Eigen::Map<const RowMajorPlane> x(input.plane(c).data(), in_height(), in_width());
    Eigen::Map<RowMajorPlane> y(out.plane(c).data(), out_height(), out_width());
    const RowMajorPlane tmp = rows_ * x;
    y = (cols_ * tmp.transpose()).transpose();
  }
  return out;
}

Tensor SeparableOperator::apply_adjoint(const Tensor& output_grad) const {
  if (output_grad.height() != out_height() || output_grad.width() != out_width()) {
    throw InvalidArgument("SeparableOperator::apply_adjoint: gradient plane size mismatch");
  }
  Tensor out(output_grad.channels(), in_height(), in_width());
  for (int c = 0; c < output_grad.channels(); ++c) {
    Eigen::Map<const RowMajorPlane> g(output_grad.plane(c).data(), out_height(), out_width());
    Eigen::Map<RowMajorPlane> y(out.plane(c).data(), in_height(), in_width());
    const RowMajorPlane tmp = rows_.transpose() * g;
    y = (cols_.transpose() * tmp.transpose()).transpose();
  }
  return out;
}

SeparableOperator::Matrix bilinear_axis(int in_size, int out_size) {
  if (in_size <= 0 || out_size <= 0) throw InvalidArgument("resize: dimensions must be positive");
  SeparableOperator::Matrix m(out_size, in_size);
  m.reserve(Eigen::VectorXi::Constant(out_size, 2));
  const double scale = static_cast<double>(in_size) / out_size;
  for (int i = 0; i < out_size; ++i) {
    const double s = (i + 0.5) * scale - 0.5;
    const double f = std::floor(s);
    const double w = s - f;
    const int i0 = std::clamp(static_cast<int>(f), 0, in_size - 1);
    const int i1 = std::clamp(static_cast<int>(f) + 1, 0, in_size - 1);
    if (1 - w != 0.0) m.coeffRef(i, i0) += 1 - w;
    if (w != 0.0) m.coeffRef(i, i1) += w;
  }
  m.makeCompressed();
  return m;
}

SeparableOperator resize_operator(int in_height, int in_width, int out_height, int out_width) {
  return SeparableOperator(bilinear_axis(in_height, out_height), bilinear_axis(in_width, out_width));
}

Tensor resize(const Tensor& input, int height, int width) {
  if (height <= 0 || width <= 0) throw InvalidArgument("resize: dimensions must be positive");
  if (height == input.height() && width == input.width()) return input;
  return resize_operator(input.height(), input.width(), height, width).apply(input);
}

Image resize(const Image& image, int height, int width) {
  if (height == image.height() && width == image.width()) return image;
  return Image::clamped(resize(image.pixels(), height, width));
}

}  // namespace flexit
