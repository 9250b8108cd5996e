#pragma once

#include <Eigen/Dense>

#include <map>
#include <string>
#include <vector>

#include "flexit/core/errors.hpp"

namespace flexit {

/// N x D feature matrix with an optional label per row.
template <typename Scalar>
struct FeatureSet {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

  Matrix features;
  std::vector<std::string> labels;  // empty or one per row

  Eigen::Index rows() const { return features.rows(); }
  Eigen::Index dim() const { return features.cols(); }
  bool labeled() const { return !labels.empty(); }

  void validate() const {
    if (features.rows() < 1) throw InvalidArgument("FeatureSet is empty");
    if (!features.allFinite()) throw InvalidArgument("FeatureSet has non-finite entries");
    if (labeled() && static_cast<Eigen::Index>(labels.size()) != features.rows()) {
      throw InvalidArgument("FeatureSet label count does not match row count");
    }
  }

  /// Rows carrying `label`, in their original order.
  FeatureSet subset(const std::string& label) const {
    std::vector<Eigen::Index> idx;
    for (std::size_t i = 0; i < labels.size(); ++i) {
      if (labels[i] == label) idx.push_back(static_cast<Eigen::Index>(i));
    }
    FeatureSet out;
    out.features = features(idx, Eigen::all);
    out.labels.assign(idx.size(), label);
    return out;
  }
};

/// Per-dimension mean and population (divisor N) standard deviation.
template <typename Scalar>
struct FeatureStats {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> mean;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> std;
};

template <typename Scalar>
FeatureStats<Scalar> feature_stats(const FeatureSet<Scalar>& fs) {
  if (fs.rows() < 1) throw InvalidArgument("feature_stats: empty feature set");
  const auto n = static_cast<Scalar>(fs.rows());
  FeatureStats<Scalar> s;
  s.mean = fs.features.colwise().mean().transpose();
  s.std = ((fs.features.rowwise() - s.mean.transpose()).array().square().colwise().sum() / n)
              .sqrt()
              .transpose();
  return s;
}

/// |mu_r - mu_s|^2 + alpha * |sigma_r - sigma_s|^2. The published protocol
/// uses alpha = 0.
template <typename Scalar>
Scalar sfid(const FeatureSet<Scalar>& real, const FeatureSet<Scalar>& synth, Scalar alpha = 0) {
  if (real.rows() < 1 || synth.rows() < 1) throw InvalidArgument("sfid: empty feature set");
  if (real.dim() != synth.dim()) {
    throw InvalidArgument("sfid: feature dimensions differ (" + std::to_string(real.dim()) +
                          " vs " + std::to_string(synth.dim()) + ")");
  }
  const auto r = feature_stats(real);
  const auto s = feature_stats(synth);
  Scalar value = (r.mean - s.mean).squaredNorm();
  if (alpha != 0) value += alpha * (r.std - s.std).squaredNorm();
  return value;
}

/// Mean over synthetic labels c of sfid(real_c, synth_c, alpha). Every
/// synthetic label must have at least one reference row.
template <typename Scalar>
Scalar csfid(const FeatureSet<Scalar>& real, const FeatureSet<Scalar>& synth, Scalar alpha = 0) {
  if (!real.labeled() || !synth.labeled()) throw InvalidArgument("csfid: feature sets need labels");
  real.validate();
  synth.validate();
  std::map<std::string, int> synth_labels;
  for (const auto& l : synth.labels) ++synth_labels[l];
  std::map<std::string, int> real_labels;
  for (const auto& l : real.labels) ++real_labels[l];
  Scalar total = 0;
  for (const auto& [label, count] : synth_labels) {
    if (!real_labels.count(label)) throw MissingReference(label);
    total += sfid(real.subset(label), synth.subset(label), alpha);
  }
  return total / static_cast<Scalar>(synth_labels.size());
}

}  // namespace flexit
