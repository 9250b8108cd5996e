#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "flexit/backends/interfaces.hpp"
#include "flexit/core/resample.hpp"

namespace flexit {

/// Maps text to a Gaussian vector seeded by a hash of (seed, text).
class HashTextEncoder final : public TextEncoder {
 public:
  HashTextEncoder(int dim, std::uint64_t seed, std::string name = "hash-text");
  std::string name() const override { return name_; }
  int embed_dim() const override { return dim_; }
  EmbeddingVector encode_text(const std::string& text) const override;

 private:
  int dim_;
  std::uint64_t seed_;
  std::string name_;
};

/// e = W * vec(x) + b over an image at a fixed (small) resolution.
class LinearImageEmbedder final : public ImageEmbedder {
 public:
  LinearImageEmbedder(int dim, int resolution, std::uint64_t seed, std::string name = "linear");
  LinearImageEmbedder(Eigen::MatrixXd weights, Eigen::VectorXd bias, int resolution,
                      std::string name = "linear");

  std::string name() const override { return name_; }
  int embed_dim() const override { return static_cast<int>(weights_.rows()); }
  int input_resolution() const override { return resolution_; }
  EmbeddingVector encode_image(const Image& image) const override;
  Tensor encode_image_vjp(const Image& image, const Eigen::VectorXd& grad_out) const override;

  const Eigen::MatrixXd& weights() const noexcept { return weights_; }
  const Eigen::VectorXd& bias() const noexcept { return bias_; }

 private:
  Eigen::MatrixXd weights_;
  Eigen::VectorXd bias_;
  int resolution_;
  std::string name_;
};

/// Latent = pixels at the native resolution; reconstruction is exact.
class IdentityAutoencoder final : public Autoencoder {
 public:
  explicit IdentityAutoencoder(int resolution);
  std::string name() const override { return "identity"; }
  int native_resolution() const override { return resolution_; }
  LatentShape latent_shape() const override { return {3, resolution_, resolution_}; }
  LatentCode encode(const Image& image) const override;
  Image decode(const LatentCode& latent) const override;
  Tensor decode_vjp(const LatentCode& latent, const Tensor& grad_image) const override;

 private:
  int resolution_;
};

/// Stride-2 average-pool encoder, bilinear x2 upsampling decoder.
class PoolingAutoencoder final : public Autoencoder {
 public:
  explicit PoolingAutoencoder(int resolution);
  std::string name() const override { return "avgpool"; }
  int native_resolution() const override { return resolution_; }
  LatentShape latent_shape() const override { return {3, resolution_ / 2, resolution_ / 2}; }
  LatentCode encode(const Image& image) const override;
  Image decode(const LatentCode& latent) const override;
  Tensor decode_vjp(const LatentCode& latent, const Tensor& grad_image) const override;

 private:
  int resolution_;
  SeparableOperator pool_;
  SeparableOperator upsample_;
};

/// Weighted multi-scale distance over Gaussian-pyramid features:
///   d(a, b) = sum_l w_l / P_l * |phi_l(a) - phi_l(b)|^2,
///   phi_l(x) = tanh(A_l x + c_l) applied per pixel,
/// where level l+1 is a [1 4 6 4 1]/16 blur of level l subsampled by 2.
class PyramidPerceptualDistance final : public PerceptualDistance {
 public:
  explicit PyramidPerceptualDistance(std::uint64_t seed, int levels = 3, int feature_channels = 4,
                                     std::string name = "pyramid");

  std::string name() const override { return name_; }
  std::uint64_t feature_seed() const override { return seed_; }
  using PerceptualDistance::distance;
  double distance(const Tensor& a, const Tensor& b) const override;
  Tensor gradient(const Tensor& fixed, const Tensor& moving) const override;

 private:
  struct Level {
    Eigen::MatrixXd mix;    // feature_channels x 3
    Eigen::VectorXd shift;  // feature_channels
    double weight;
  };

  std::vector<Tensor> pyramid(const Tensor& x) const;
  Tensor features(const Tensor& x, const Level& level) const;

  std::uint64_t seed_;
  std::vector<Level> levels_;
  std::string name_;
};

/// Blur-and-subsample-by-2 operator used by the pyramid (exposed for tests).
SeparableOperator pyramid_down_operator(int height, int width);

enum class SurrogateAutoencoderKind { Identity, AvgPool };

struct SurrogateOptions {
  std::vector<int> member_dims{16, 16, 24};
  int member_resolution = 8;
  int encode_resolution = 32;
  SurrogateAutoencoderKind autoencoder = SurrogateAutoencoderKind::AvgPool;
};

using SurrogateSuite = BackendSet;

/// Deterministic toy backends for desk-scale runs. The two perceptual
/// distances are built from different seeds.
SurrogateSuite surrogate_suite(std::uint64_t seed, const SurrogateOptions& options = {});

}  // namespace flexit
