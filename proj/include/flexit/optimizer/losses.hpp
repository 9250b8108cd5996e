#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

#include "flexit/backends/ensemble.hpp"
#include "flexit/backends/interfaces.hpp"
#include "flexit/core/hyperparams.hpp"
#include "flexit/core/resample.hpp"
#include "flexit/core/types.hpp"

namespace flexit {

/// Draw key used for the image term of the target point. Optimization steps
/// use their step index, so this never collides with a step.
inline constexpr std::uint64_t kTargetDrawBase = ~std::uint64_t{0};

struct LossBreakdown {
  int step = 0;
  double emb = 0.0;
  double perc = 0.0;
  double latent = 0.0;
  double total = 0.0;
};

/// P = E_t(T) + lambda_image * E_i(I0) - lambda_source * E_t(S), with the
/// image term averaged over the ensemble's augmentations.
TargetPoint compute_target(const Image& input, const std::string& source_text,
                           const std::string& target_text, const EnsembleEmbedder& ensemble,
                           double lambda_image, double lambda_source);

/// Backends an optimization run needs. All are shared, immutable objects.
struct OptimizerBackends {
  std::shared_ptr<const Autoencoder> autoencoder;
  std::shared_ptr<const EnsembleEmbedder> ensemble;
  std::shared_ptr<const PerceptualDistance> perceptual;  // optimization instance
};

/// Builds the ensemble from a backend set using hp.augmentations and a
/// default augmentation recipe seeded with hp.rng_seed.
OptimizerBackends make_optimizer_backends(const BackendSet& backends, const HyperParams& hp);

/// Fixed quantities of one run: P, I0, z0 and backends.
struct LossContext {
  TargetPoint target;
  Image input;
  Tensor input_at_metric;  // I0 resized to hp.metric_resolution
  LatentCode initial;      // z0
  OptimizerBackends backends;
  HyperParams hp;
  std::optional<SeparableOperator> decode_to_metric;  // unset when sizes agree
};

LossContext make_loss_context(const Image& input, const std::string& source_text,
                              const std::string& target_text, const OptimizerBackends& backends,
                              const HyperParams& hp);

/// |E_i(D(z)) - P|^2 with augmentation draws keyed by `step`.
double embedding_loss(const LatentCode& z, const TargetPoint& target, const Autoencoder& decoder,
                      const EnsembleEmbedder& ensemble, std::uint64_t step);

/// d(D(z), I0), both resized to `metric_resolution`.
double perceptual_loss(const LatentCode& z, const Image& input, const Autoencoder& decoder,
                       const PerceptualDistance& distance, int metric_resolution);

/// L21: sum over positions of the channel-vector norm of z - z0.
/// L1: sum of absolute entries. L2: global Euclidean norm.
double latent_loss(const LatentCode& z, const LatentCode& initial, LatentNorm norm);

/// A (sub)gradient of latent_loss; zero where the norm is not differentiable.
Tensor latent_loss_gradient(const LatentCode& z, const LatentCode& initial, LatentNorm norm);

/// Assembles a breakdown: total = emb + lambda_perceptual * perc + lambda_latent * latent.
LossBreakdown combine_losses(int step, double emb, double perc, double latent,
                             const HyperParams& hp);

LossBreakdown total_loss(const LatentCode& z, const LossContext& context, int step);

struct LossAndGradient {
  LossBreakdown loss;
  Tensor gradient;  // d total / d z
};

LossAndGradient total_loss_with_gradient(const LatentCode& z, const LossContext& context,
                                         int step);

}  // namespace flexit
