#include "flexit/metrics/evaluators.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "flexit/core/errors.hpp"
#include "flexit/core/random.hpp"
#include "flexit/core/resample.hpp"

namespace flexit {

namespace {

// Adaptive average pooling along one axis: bin i covers
// [floor(i * in / out), ceil((i + 1) * in / out)).
SeparableOperator::Matrix adaptive_pool_axis(int in_size, int out_size) {
  SeparableOperator::Matrix m(out_size, in_size);
  for (int i = 0; i < out_size; ++i) {
    const int lo = (i * in_size) / out_size;
    const int hi = ((i + 1) * in_size + out_size - 1) / out_size;
    for (int j = lo; j < hi; ++j) m.insert(i, j) = 1.0 / (hi - lo);
  }
  m.makeCompressed();
  return m;
}

}  // namespace

SurrogateFeatureExtractor::SurrogateFeatureExtractor(std::uint64_t seed, int dim, int resolution,
                                                     int grid)
    : resolution_(resolution), grid_(grid) {
  if (dim <= 0 || grid <= 0 || resolution < grid) {
    throw InvalidArgument("SurrogateFeatureExtractor: invalid dimensions");
  }
  Rng rng = make_rng({seed, 0x33u});
  const Eigen::Index inputs = 3LL * grid * grid;
  weights_.resize(dim, inputs);
  for (Eigen::Index j = 0; j < inputs; ++j) {
    for (Eigen::Index i = 0; i < dim; ++i) weights_(i, j) = standard_normal(rng);
  }
  weights_ /= std::sqrt(static_cast<double>(inputs));
  bias_.resize(dim);
  for (Eigen::Index i = 0; i < dim; ++i) bias_[i] = 0.1 * standard_normal(rng);
}

Eigen::VectorXd SurrogateFeatureExtractor::extract(const Image& image) const {
  const auto resized = resize(image, resolution_, resolution_);
  const SeparableOperator pool(adaptive_pool_axis(resolution_, grid_),
                               adaptive_pool_axis(resolution_, grid_));
  const Tensor pooled = pool.apply(resized.pixels());
  return (weights_ * pooled.data() + bias_).array().tanh().matrix();
}

LinearProbeClassifier::LinearProbeClassifier(Eigen::MatrixXd weights, Eigen::VectorXd bias,
                                             int resolution, std::vector<std::string> vocabulary,
                                             std::string name)
    : weights_(std::move(weights)), bias_(std::move(bias)), resolution_(resolution),
      vocabulary_(std::move(vocabulary)), name_(std::move(name)) {
  if (weights_.rows() != static_cast<Eigen::Index>(vocabulary_.size()) ||
      bias_.size() != weights_.rows() || weights_.cols() != 3LL * resolution_ * resolution_) {
    throw InvalidArgument("LinearProbeClassifier: shapes do not match vocabulary/resolution");
  }
}

LinearProbeClassifier LinearProbeClassifier::random(std::uint64_t seed, int resolution,
                                                    std::vector<std::string> vocabulary) {
  Rng rng = make_rng({seed, 0x44u});
  const Eigen::Index inputs = 3LL * resolution * resolution;
  const auto n = static_cast<Eigen::Index>(vocabulary.size());
  Eigen::MatrixXd w(n, inputs);
  for (Eigen::Index j = 0; j < inputs; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) w(i, j) = standard_normal(rng);
  }
  Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
  return LinearProbeClassifier(std::move(w), std::move(b), resolution, std::move(vocabulary),
                               "random-probe");
}

LinearProbeClassifier LinearProbeClassifier::from_prototypes(const std::vector<Image>& prototypes,
                                                             std::vector<std::string> vocabulary) {
  if (prototypes.empty() || prototypes.size() != vocabulary.size()) {
    throw InvalidArgument("from_prototypes: need one prototype per vocabulary entry");
  }
  const int res = prototypes.front().height();
  const auto n = static_cast<Eigen::Index>(prototypes.size());
  Eigen::MatrixXd w(n, 3LL * res * res);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = resize(prototypes[i], res, res).pixels().data();
    w.row(i) = 2.0 * p.transpose();
    b[i] = -p.squaredNorm();
  }
  return LinearProbeClassifier(std::move(w), std::move(b), res, std::move(vocabulary),
                               "prototype-probe");
}

Eigen::VectorXd LinearProbeClassifier::logits(const Image& image) const {
  return weights_ * resize(image, resolution_, resolution_).pixels().data() + bias_;
}

int restricted_argmax(const Eigen::VectorXd& logits, const std::vector<int>& subset) {
  if (subset.empty()) throw InvalidArgument("restricted_argmax: empty label subset");
  int best = -1;
  for (int idx : std::set<int>(subset.begin(), subset.end())) {
    if (idx < 0 || idx >= logits.size()) {
      throw InvalidArgument("restricted_argmax: label index " + std::to_string(idx) +
                            " outside the vocabulary");
    }
    if (best < 0 || logits[idx] > logits[best]) best = idx;
  }
  return best;
}

double restricted_accuracy(const std::vector<Image>& images, const std::vector<int>& targets,
                           const Classifier& classifier, const std::vector<int>& subset) {
  if (images.size() != targets.size()) {
    throw InvalidArgument("restricted_accuracy: one target per image required");
  }
  if (images.empty()) throw InvalidArgument("restricted_accuracy: no images");
  const std::set<int> allowed(subset.begin(), subset.end());
  for (int t : targets) {
    if (!allowed.count(t)) {
      throw InvalidArgument("restricted_accuracy: target " + std::to_string(t) +
                            " is outside the label subset");
    }
  }
  std::size_t hits = 0;
  for (std::size_t i = 0; i < images.size(); ++i) {
    hits += restricted_argmax(classifier.logits(images[i]), subset) == targets[i];
  }
  return 100.0 * static_cast<double>(hits) / static_cast<double>(images.size());
}

double eval_perceptual(const Image& a, const Image& b, const PerceptualDistance& distance,
                       int resolution) {
  return 100.0 * distance.distance(resize(a, resolution, resolution),
                                   resize(b, resolution, resolution));
}

}  // namespace flexit
