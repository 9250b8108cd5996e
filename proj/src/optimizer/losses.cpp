#include "flexit/optimizer/losses.hpp"

#include <cmath>

#include "flexit/core/errors.hpp"

namespace flexit {

TargetPoint compute_target(const Image& input, const std::string& source_text,
                           const std::string& target_text, const EnsembleEmbedder& ensemble,
                           double lambda_image, double lambda_source) {
  if (source_text.empty() || target_text.empty()) {
    throw InvalidArgument("compute_target: source and target text must be non-empty");
  }
  const auto t = ensemble.embed_text(target_text);
  const auto s = ensemble.embed_text(source_text);
  const auto i = ensemble.embed_image(input, kTargetDrawBase);
  return {t.values + lambda_image * i.values - lambda_source * s.values};
}

OptimizerBackends make_optimizer_backends(const BackendSet& backends, const HyperParams& hp) {
  AugmentationSpec spec;
  spec.seed = hp.rng_seed;
  auto ensemble = std::make_shared<const EnsembleEmbedder>(
      backends.image_embedders, backends.text_encoders, hp.augmentations, spec);
  return {backends.autoencoder, std::move(ensemble), backends.optimization_distance};
}

LossContext make_loss_context(const Image& input, const std::string& source_text,
                              const std::string& target_text, const OptimizerBackends& backends,
                              const HyperParams& hp) {
  hp.validate();
  if (!backends.autoencoder || !backends.ensemble || !backends.perceptual) {
    throw InvalidArgument("optimizer backends are incomplete");
  }
  const auto& ae = *backends.autoencoder;
  if (ae.native_resolution() != hp.encode_resolution) {
    throw InvalidArgument("autoencoder native resolution " +
                          std::to_string(ae.native_resolution()) +
                          " != encode_resolution " + std::to_string(hp.encode_resolution));
  }
  const int mr = hp.metric_resolution;
  LossContext ctx{
      compute_target(input, source_text, target_text, *backends.ensemble, hp.lambda_image,
                     hp.lambda_source),
      input,
      resize(input, mr, mr).pixels(),
      ae.encode(resize(input, hp.encode_resolution, hp.encode_resolution)),
      backends,
      hp,
      std::nullopt};
  if (mr != ae.native_resolution()) {
    ctx.decode_to_metric = resize_operator(ae.native_resolution(), ae.native_resolution(), mr, mr);
  }
  return ctx;
}

double embedding_loss(const LatentCode& z, const TargetPoint& target, const Autoencoder& decoder,
                      const EnsembleEmbedder& ensemble, std::uint64_t step) {
  const auto e = ensemble.embed_image(decoder.decode(z), step);
  if (e.dim() != target.dim()) throw InvalidArgument("embedding_loss: target dimension mismatch");
  return (e.values - target.values).squaredNorm();
}

double perceptual_loss(const LatentCode& z, const Image& input, const Autoencoder& decoder,
                       const PerceptualDistance& distance, int metric_resolution) {
  const auto decoded = resize(decoder.decode(z), metric_resolution, metric_resolution);
  return distance.distance(decoded, resize(input, metric_resolution, metric_resolution));
}

namespace {

void check_same_shape(const LatentCode& z, const LatentCode& initial) {
  if (z.shape() != initial.shape()) {
    throw InvalidArgument("latent_loss: shape " + to_string(z.shape()) + " != " +
                          to_string(initial.shape()));
  }
}

}  // namespace

double latent_loss(const LatentCode& z, const LatentCode& initial, LatentNorm norm) {
  check_same_shape(z, initial);
  const Eigen::VectorXd delta = z.values().data() - initial.values().data();
  switch (norm) {
    case LatentNorm::L1: return delta.lpNorm<1>();
    case LatentNorm::L2: return delta.norm();
    case LatentNorm::L21: {
      const Eigen::Map<const Eigen::MatrixXd> positions(delta.data(), z.values().plane_size(),
                                                        z.values().channels());
      return positions.rowwise().norm().sum();
    }
  }
  return 0.0;
}

Tensor latent_loss_gradient(const LatentCode& z, const LatentCode& initial, LatentNorm norm) {
  check_same_shape(z, initial);
  Tensor grad = Tensor::zeros_like(z.values());
  const Eigen::VectorXd delta = z.values().data() - initial.values().data();
  switch (norm) {
    case LatentNorm::L1:
      grad.data() = delta.array().sign().matrix();
      break;
    case LatentNorm::L2: {
      const double n = delta.norm();
      if (n > 0) grad.data() = delta / n;
      break;
    }
    case LatentNorm::L21: {
      const auto hw = z.values().plane_size();
      const Eigen::Map<const Eigen::MatrixXd> positions(delta.data(), hw, z.values().channels());
      Eigen::Map<Eigen::MatrixXd> out(grad.data().data(), hw, z.values().channels());
      const Eigen::VectorXd norms = positions.rowwise().norm();
      for (Eigen::Index p = 0; p < hw; ++p) {
        if (norms[p] > 0) out.row(p) = positions.row(p) / norms[p];
      }
      break;
    }
  }
  return grad;
}

LossBreakdown combine_losses(int step, double emb, double perc, double latent,
                             const HyperParams& hp) {
  return {step, emb, perc, latent,
          emb + hp.lambda_perceptual * perc + hp.lambda_latent * latent};
}

namespace {

LossAndGradient evaluate(const LatentCode& z, const LossContext& ctx, int step,
                         bool with_gradient) {
  const auto& ae = *ctx.backends.autoencoder;
  const auto& ensemble = *ctx.backends.ensemble;
  const auto& pd = *ctx.backends.perceptual;
  const auto& hp = ctx.hp;

  LossAndGradient out;
  out.loss.step = step;
  const Image decoded = ae.decode(z);

  const auto pass = ensemble.forward(decoded, static_cast<std::uint64_t>(step));
  const Eigen::VectorXd residual = pass.embedding.values - ctx.target.values;
  out.loss.emb = residual.squaredNorm();

  const Tensor at_metric =
      ctx.decode_to_metric ? ctx.decode_to_metric->apply(decoded.pixels()) : decoded.pixels();
  out.loss.perc = pd.distance(ctx.input_at_metric, at_metric);
  out.loss = combine_losses(step, out.loss.emb, out.loss.perc,
                            latent_loss(z, ctx.initial, hp.latent_norm), hp);

  if (!with_gradient) return out;

  Tensor g_image = ensemble.backward(pass, 2.0 * residual);
  if (hp.lambda_perceptual != 0.0) {
    Tensor g_perc = pd.gradient(ctx.input_at_metric, at_metric);
    if (ctx.decode_to_metric) g_perc = ctx.decode_to_metric->apply_adjoint(g_perc);
    g_image.data() += hp.lambda_perceptual * g_perc.data();
  }
  out.gradient = ae.decode_vjp(z, g_image);
  if (hp.lambda_latent != 0.0) {
    out.gradient.data() +=
        hp.lambda_latent * latent_loss_gradient(z, ctx.initial, hp.latent_norm).data();
  }
  return out;
}

}  // namespace

LossBreakdown total_loss(const LatentCode& z, const LossContext& context, int step) {
  return evaluate(z, context, step, false).loss;
}

LossAndGradient total_loss_with_gradient(const LatentCode& z, const LossContext& context,
                                         int step) {
  return evaluate(z, context, step, true);
}

}  // namespace flexit
