#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "flexit/core/types.hpp"

namespace flexit {

/// Text side of a multimodal encoder. Text embeddings are constants of a run,
/// so no gradient is exposed.
class TextEncoder {
 public:
  virtual ~TextEncoder() = default;
  virtual std::string name() const = 0;
  virtual int embed_dim() const = 0;
  virtual EmbeddingVector encode_text(const std::string& text) const = 0;
};

/// Image side of a multimodal encoder. Inputs are expected at
/// input_resolution() x input_resolution(); the ensemble resizes for it.
class ImageEmbedder {
 public:
  virtual ~ImageEmbedder() = default;
  virtual std::string name() const = 0;
  virtual int embed_dim() const = 0;
  virtual int input_resolution() const = 0;
  virtual EmbeddingVector encode_image(const Image& image) const = 0;
  /// Gradient of <grad_out, encode_image(image)> with respect to the pixels.
  virtual Tensor encode_image_vjp(const Image& image, const Eigen::VectorXd& grad_out) const = 0;
};

/// Image autoencoder whose latent grid is the optimization variable.
class Autoencoder {
 public:
  virtual ~Autoencoder() = default;
  virtual std::string name() const = 0;
  virtual int native_resolution() const = 0;
  virtual LatentShape latent_shape() const = 0;
  /// Resizes to the native resolution first when needed.
  virtual LatentCode encode(const Image& image) const = 0;
  /// Output is clamped to [0, 1].
  virtual Image decode(const LatentCode& latent) const = 0;
  /// Gradient through decode; the output clamp passes gradients unchanged.
  virtual Tensor decode_vjp(const LatentCode& latent, const Tensor& grad_image) const = 0;
};

/// Symmetric, non-negative image distance with d(x, x) = 0.
class PerceptualDistance {
 public:
  virtual ~PerceptualDistance() = default;
  virtual std::string name() const = 0;
  /// Seed of the feature stack; the optimization and evaluation instances differ.
  virtual std::uint64_t feature_seed() const = 0;
  virtual double distance(const Tensor& a, const Tensor& b) const = 0;
  /// Gradient of distance(fixed, moving) with respect to `moving`.
  virtual Tensor gradient(const Tensor& fixed, const Tensor& moving) const = 0;

  double distance(const Image& a, const Image& b) const { return distance(a.pixels(), b.pixels()); }
};

/// Everything the optimizer and the evaluation need from model backends.
struct BackendSet {
  std::vector<std::shared_ptr<const TextEncoder>> text_encoders;
  std::vector<std::shared_ptr<const ImageEmbedder>> image_embedders;
  std::shared_ptr<const Autoencoder> autoencoder;
  std::shared_ptr<const PerceptualDistance> optimization_distance;  // VGG-style role
  std::shared_ptr<const PerceptualDistance> evaluation_distance;    // AlexNet-style role
};

}  // namespace flexit
