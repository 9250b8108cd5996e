#pragma once

#include <Eigen/Dense>

#include "flexit/core/errors.hpp"
#include "flexit/core/types.hpp"

namespace flexit {

/// Unit-norm copy of `v`. Throws DegenerateInput for the zero vector.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> l2_normalize(
    const Eigen::MatrixBase<Derived>& v) {
  const auto norm = v.norm();
  if (!(norm > 0)) throw DegenerateInput("l2_normalize: vector has zero norm");
  return v / norm;
}

inline EmbeddingVector l2_normalize(const EmbeddingVector& v) {
  return {l2_normalize(v.values), v.provenance};
}

/// Vector-Jacobian product of v -> v / |v| evaluated at v.
template <typename DerivedV, typename DerivedG>
Eigen::Matrix<typename DerivedV::Scalar, Eigen::Dynamic, 1> l2_normalize_vjp(
    const Eigen::MatrixBase<DerivedV>& v, const Eigen::MatrixBase<DerivedG>& grad) {
  const auto norm = v.norm();
  if (!(norm > 0)) throw DegenerateInput("l2_normalize_vjp: vector has zero norm");
  const auto unit = (v / norm).eval();
  return (grad - unit * unit.dot(grad)) / norm;
}

}  // namespace flexit
