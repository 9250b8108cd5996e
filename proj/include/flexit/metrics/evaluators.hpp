#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <string>
#include <vector>

#include "flexit/backends/interfaces.hpp"
#include "flexit/core/types.hpp"

namespace flexit {

/// Image -> feature vector for (C)SFID. Works at a fixed resolution.
class FeatureExtractor {
 public:
  virtual ~FeatureExtractor() = default;
  virtual std::string name() const = 0;
  virtual int dim() const = 0;
  virtual int resolution() const = 0;
  virtual Eigen::VectorXd extract(const Image& image) const = 0;
};

/// Image -> logits over a fixed label vocabulary.
class Classifier {
 public:
  virtual ~Classifier() = default;
  virtual std::string name() const = 0;
  virtual const std::vector<std::string>& vocabulary() const = 0;
  virtual Eigen::VectorXd logits(const Image& image) const = 0;
};

/// Resize to `resolution`, average over a grid x grid partition, then
/// tanh(W * pooled + b) with seeded W, b.
class SurrogateFeatureExtractor final : public FeatureExtractor {
 public:
  SurrogateFeatureExtractor(std::uint64_t seed, int dim = 16, int resolution = 256, int grid = 8);
  std::string name() const override { return "surrogate-features"; }
  int dim() const override { return static_cast<int>(weights_.rows()); }
  int resolution() const override { return resolution_; }
  Eigen::VectorXd extract(const Image& image) const override;

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd bias_;
  int resolution_;
  int grid_;
};

/// logits = W * vec(resize(image, resolution)) + b.
class LinearProbeClassifier final : public Classifier {
 public:
  LinearProbeClassifier(Eigen::MatrixXd weights, Eigen::VectorXd bias, int resolution,
                        std::vector<std::string> vocabulary, std::string name = "linear-probe");

  /// Seeded random probe.
  static LinearProbeClassifier random(std::uint64_t seed, int resolution,
                                      std::vector<std::string> vocabulary);
  /// Nearest-prototype probe: logit_c = 2 <p_c, x> - |p_c|^2, which ranks
  /// labels exactly like -|x - p_c|^2.
  static LinearProbeClassifier from_prototypes(const std::vector<Image>& prototypes,
                                               std::vector<std::string> vocabulary);

  std::string name() const override { return name_; }
  const std::vector<std::string>& vocabulary() const override { return vocabulary_; }
  Eigen::VectorXd logits(const Image& image) const override;

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd bias_;
  int resolution_;
  std::vector<std::string> vocabulary_;
  std::string name_;
};

/// Index of the largest logit among `subset` (vocabulary indices); ties go to
/// the lowest index.
int restricted_argmax(const Eigen::VectorXd& logits, const std::vector<int>& subset);

/// Percentage of images whose restricted argmax equals the target index.
double restricted_accuracy(const std::vector<Image>& images, const std::vector<int>& targets,
                           const Classifier& classifier, const std::vector<int>& subset);

/// 100 * d(resize(a), resize(b)) at the metric resolution.
double eval_perceptual(const Image& a, const Image& b, const PerceptualDistance& distance,
                       int resolution = 256);

}  // namespace flexit
