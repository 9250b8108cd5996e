#include "flexit/backends/surrogates.hpp"

#include <cmath>

#include "flexit/core/errors.hpp"
#include "flexit/core/random.hpp"

namespace flexit {

namespace {

Eigen::VectorXd gaussian_vector(Eigen::Index n, Rng& rng) {
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = standard_normal(rng);
  return v;
}

Eigen::MatrixXd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = standard_normal(rng);
  }
  return m;
}

SeparableOperator::Matrix average_pool_axis(int in_size) {
  SeparableOperator::Matrix m(in_size / 2, in_size);
  m.reserve(Eigen::VectorXi::Constant(in_size / 2, 2));
  for (int i = 0; i < in_size / 2; ++i) {
    m.insert(i, 2 * i) = 0.5;
    m.insert(i, 2 * i + 1) = 0.5;
  }
  m.makeCompressed();
  return m;
}

SeparableOperator::Matrix binomial_down_axis(int in_size) {
  static constexpr double kTaps[5] = {1 / 16.0, 4 / 16.0, 6 / 16.0, 4 / 16.0, 1 / 16.0};
  const int out_size = (in_size + 1) / 2;
  SeparableOperator::Matrix m(out_size, in_size);
  m.reserve(Eigen::VectorXi::Constant(out_size, 5));
  for (int i = 0; i < out_size; ++i) {
    for (int k = 0; k < 5; ++k) {
      const int src = std::clamp(2 * i + k - 2, 0, in_size - 1);
      m.coeffRef(i, src) += kTaps[k];
    }
  }
  m.makeCompressed();
  return m;
}

}  // namespace

// ---------------------------------------------------------------------------

HashTextEncoder::HashTextEncoder(int dim, std::uint64_t seed, std::string name)
    : dim_(dim), seed_(seed), name_(std::move(name)) {
  if (dim <= 0) throw InvalidArgument("HashTextEncoder: dim must be positive");
}

EmbeddingVector HashTextEncoder::encode_text(const std::string& text) const {
  Rng rng = make_rng({seed_, fnv1a64(text)});
  return {gaussian_vector(dim_, rng), name_};
}

// ---------------------------------------------------------------------------

LinearImageEmbedder::LinearImageEmbedder(int dim, int resolution, std::uint64_t seed,
                                         std::string name)
    : resolution_(resolution), name_(std::move(name)) {
  if (dim <= 0 || resolution <= 0) {
    throw InvalidArgument("LinearImageEmbedder: dim and resolution must be positive");
  }
  Rng rng = make_rng({seed, 0x11u});
  const Eigen::Index inputs = 3LL * resolution * resolution;
  weights_ = gaussian_matrix(dim, inputs, rng) / std::sqrt(static_cast<double>(inputs));
  bias_ = 0.1 * gaussian_vector(dim, rng);
}

LinearImageEmbedder::LinearImageEmbedder(Eigen::MatrixXd weights, Eigen::VectorXd bias,
                                         int resolution, std::string name)
    : weights_(std::move(weights)), bias_(std::move(bias)), resolution_(resolution),
      name_(std::move(name)) {
  if (weights_.cols() != 3LL * resolution * resolution || bias_.size() != weights_.rows()) {
    throw InvalidArgument("LinearImageEmbedder: weight/bias shapes do not match resolution");
  }
}

EmbeddingVector LinearImageEmbedder::encode_image(const Image& image) const {
  if (image.height() != resolution_ || image.width() != resolution_) {
    throw InvalidArgument("LinearImageEmbedder: expected a " + std::to_string(resolution_) +
                          "x" + std::to_string(resolution_) + " image");
  }
  return {weights_ * image.pixels().data() + bias_, name_};
}

Tensor LinearImageEmbedder::encode_image_vjp(const Image& image,
                                             const Eigen::VectorXd& grad_out) const {
  if (grad_out.size() != weights_.rows()) {
    throw InvalidArgument("LinearImageEmbedder: gradient size mismatch");
  }
  return Tensor(3, image.height(), image.width(), weights_.transpose() * grad_out);
}

// ---------------------------------------------------------------------------

IdentityAutoencoder::IdentityAutoencoder(int resolution) : resolution_(resolution) {
  if (resolution < kMinImageSide) throw InvalidArgument("IdentityAutoencoder: resolution too small");
}

LatentCode IdentityAutoencoder::encode(const Image& image) const {
  return LatentCode(resize(image, resolution_, resolution_).pixels());
}

Image IdentityAutoencoder::decode(const LatentCode& latent) const {
  if (latent.shape() != latent_shape()) {
    throw InvalidArgument("IdentityAutoencoder: latent shape " + to_string(latent.shape()) +
                          " != " + to_string(latent_shape()));
  }
  return Image::clamped(latent.values());
}

Tensor IdentityAutoencoder::decode_vjp(const LatentCode& latent, const Tensor& grad_image) const {
  if (latent.shape() != latent_shape() || !grad_image.same_shape(latent.values())) {
    throw InvalidArgument("IdentityAutoencoder: gradient shape mismatch");
  }
  return grad_image;
}

PoolingAutoencoder::PoolingAutoencoder(int resolution)
    : resolution_(resolution),
      pool_(average_pool_axis(resolution), average_pool_axis(resolution)),
      upsample_(resize_operator(resolution / 2, resolution / 2, resolution, resolution)) {
  if (resolution < kMinImageSide || resolution % 2 != 0) {
    throw InvalidArgument("PoolingAutoencoder: resolution must be even and >= 8");
  }
}

LatentCode PoolingAutoencoder::encode(const Image& image) const {
  return LatentCode(pool_.apply(resize(image, resolution_, resolution_).pixels()));
}

Image PoolingAutoencoder::decode(const LatentCode& latent) const {
  if (latent.shape() != latent_shape()) {
    throw InvalidArgument("PoolingAutoencoder: latent shape " + to_string(latent.shape()) +
                          " != " + to_string(latent_shape()));
  }
  return Image::clamped(upsample_.apply(latent.values()));
}

Tensor PoolingAutoencoder::decode_vjp(const LatentCode& latent, const Tensor& grad_image) const {
  if (latent.shape() != latent_shape()) {
    throw InvalidArgument("PoolingAutoencoder: latent shape mismatch");
  }
  return upsample_.apply_adjoint(grad_image);
}

// ---------------------------------------------------------------------------

SeparableOperator pyramid_down_operator(int height, int width) {
  return SeparableOperator(binomial_down_axis(height), binomial_down_axis(width));
}

PyramidPerceptualDistance::PyramidPerceptualDistance(std::uint64_t seed, int levels,
                                                     int feature_channels, std::string name)
    : seed_(seed), name_(std::move(name)) {
  if (levels <= 0 || feature_channels <= 0) {
    throw InvalidArgument("PyramidPerceptualDistance: levels and channels must be positive");
  }
  Rng rng = make_rng({seed, 0x22u});
  for (int l = 0; l < levels; ++l) {
    Level level;
    level.mix = gaussian_matrix(feature_channels, 3, rng);
    level.shift = 0.1 * gaussian_vector(feature_channels, rng);
    level.weight = uniform(rng, 0.5, 1.5);
    levels_.push_back(std::move(level));
  }
}

std::vector<Tensor> PyramidPerceptualDistance::pyramid(const Tensor& x) const {
  std::vector<Tensor> out{x};
  while (out.size() < levels_.size() && out.back().height() >= 2 && out.back().width() >= 2) {
    const auto& t = out.back();
    out.push_back(pyramid_down_operator(t.height(), t.width()).apply(t));
  }
  return out;
}

Tensor PyramidPerceptualDistance::features(const Tensor& x, const Level& level) const {
  const auto pixels = x.positions();  // P x 3
  Eigen::MatrixXd f = (pixels * level.mix.transpose()).rowwise() + level.shift.transpose();
  f = f.array().tanh().matrix();
  return Tensor(static_cast<int>(level.mix.rows()), x.height(), x.width(),
                Eigen::Map<const Eigen::VectorXd>(f.data(), f.size()));
}

double PyramidPerceptualDistance::distance(const Tensor& a, const Tensor& b) const {
  if (!a.same_shape(b) || a.channels() != 3) {
    throw InvalidArgument("perceptual distance: images must have the same 3-channel shape");
  }
  const auto pa = pyramid(a);
  const auto pb = pyramid(b);
  double total = 0.0;
  for (std::size_t l = 0; l < pa.size(); ++l) {
    const auto fa = features(pa[l], levels_[l]);
    const auto fb = features(pb[l], levels_[l]);
    total += levels_[l].weight / static_cast<double>(pa[l].plane_size()) *
             (fa.data() - fb.data()).squaredNorm();
  }
  return total;
}

Tensor PyramidPerceptualDistance::gradient(const Tensor& fixed, const Tensor& moving) const {
  if (!fixed.same_shape(moving) || fixed.channels() != 3) {
    throw InvalidArgument("perceptual distance: images must have the same 3-channel shape");
  }
  const auto pf = pyramid(fixed);
  const auto pm = pyramid(moving);
  Tensor carry;  // gradient flowing up from coarser levels
  for (std::size_t l = pm.size(); l-- > 0;) {
    const auto& level = levels_[l];
    const auto ff = features(pf[l], level);
    const auto fm = features(pm[l], level);
    const double scale = 2.0 * level.weight / static_cast<double>(pm[l].plane_size());
    // d/dphi, then through tanh and the channel mix.
    Eigen::VectorXd g_phi = scale * (fm.data() - ff.data());
    g_phi.array() *= 1.0 - fm.data().array().square();
    const Eigen::Map<const Eigen::MatrixXd> g_mat(g_phi.data(), pm[l].plane_size(), level.mix.rows());
    const Eigen::MatrixXd g_pix = g_mat * level.mix;  // P x 3
    Tensor g(3, pm[l].height(), pm[l].width(),
             Eigen::Map<const Eigen::VectorXd>(g_pix.data(), g_pix.size()));
    if (carry.size() > 0) g.data() += carry.data();
    if (l > 0) {
      carry = pyramid_down_operator(pm[l - 1].height(), pm[l - 1].width()).apply_adjoint(g);
    } else {
      carry = std::move(g);
    }
  }
  return carry;
}

// ---------------------------------------------------------------------------

SurrogateSuite surrogate_suite(std::uint64_t seed, const SurrogateOptions& options) {
  if (options.member_dims.empty()) throw InvalidArgument("surrogate_suite: no members");
  SurrogateSuite suite;
  for (std::size_t m = 0; m < options.member_dims.size(); ++m) {
    const auto member_seed = derive_key({seed, 0x100u + m});
    const std::string name = "surrogate-" + std::to_string(m);
    suite.text_encoders.push_back(
        std::make_shared<HashTextEncoder>(options.member_dims[m], member_seed, name));
    suite.image_embedders.push_back(std::make_shared<LinearImageEmbedder>(
        options.member_dims[m], options.member_resolution, member_seed, name));
  }
  switch (options.autoencoder) {
    case SurrogateAutoencoderKind::Identity:
      suite.autoencoder = std::make_shared<IdentityAutoencoder>(options.encode_resolution);
      break;
    case SurrogateAutoencoderKind::AvgPool:
      suite.autoencoder = std::make_shared<PoolingAutoencoder>(options.encode_resolution);
      break;
  }
  const auto opt_seed = derive_key({seed, 0x200u});
  const auto eval_seed = derive_key({seed, 0x300u});
  suite.optimization_distance =
      std::make_shared<PyramidPerceptualDistance>(opt_seed, 3, 4, "pyramid-optimization");
  suite.evaluation_distance =
      std::make_shared<PyramidPerceptualDistance>(eval_seed, 3, 4, "pyramid-evaluation");
  return suite;
}

}  // namespace flexit
