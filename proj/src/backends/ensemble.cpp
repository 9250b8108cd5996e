#include "flexit/backends/ensemble.hpp"

#include "flexit/core/errors.hpp"
#include "flexit/core/random.hpp"
#include "flexit/core/vector_math.hpp"

namespace flexit {

EnsembleEmbedder::EnsembleEmbedder(std::vector<std::shared_ptr<const ImageEmbedder>> image_members,
                                   std::vector<std::shared_ptr<const TextEncoder>> text_members,
                                   int augmentations, AugmentationSpec spec,
                                   bool normalize_members)
    : image_members_(std::move(image_members)),
      text_members_(std::move(text_members)),
      augmentations_(augmentations),
      spec_(spec),
      normalize_(normalize_members) {
  if (image_members_.empty()) throw InvalidArgument("ensemble needs at least one member");
  if (image_members_.size() != text_members_.size()) {
    throw InvalidArgument("ensemble needs one text encoder per image embedder");
  }
  if (augmentations_ < 0) throw InvalidArgument("augmentations must be non-negative");
  spec_.validate();
  for (std::size_t m = 0; m < image_members_.size(); ++m) {
    if (!image_members_[m] || !text_members_[m]) throw InvalidArgument("null ensemble member");
    if (image_members_[m]->embed_dim() != text_members_[m]->embed_dim()) {
      throw InvalidArgument("member " + std::to_string(m) +
                            ": text and image embedding dimensions differ");
    }
    offsets_.push_back(total_dim_);
    total_dim_ += image_members_[m]->embed_dim();
  }
}

EmbeddingVector EnsembleEmbedder::embed_text(const std::string& text) const {
  if (text.empty()) throw InvalidArgument("embed_text: empty text");
  EmbeddingVector out{Eigen::VectorXd(total_dim_), "ensemble"};
  for (std::size_t m = 0; m < text_members_.size(); ++m) {
    const auto e = text_members_[m]->encode_text(text);
    const int dim = text_members_[m]->embed_dim();
    out.values.segment(offsets_[m], dim) = normalize_ ? l2_normalize(e.values) : e.values;
  }
  return out;
}

EmbeddingVector EnsembleEmbedder::embed_image(const Image& image, std::uint64_t draw_base) const {
  return forward(image, draw_base).embedding;
}

EnsembleEmbedder::Pass EnsembleEmbedder::forward(const Image& image,
                                                 std::uint64_t draw_base) const {
  Pass pass;
  pass.height = image.height();
  pass.width = image.width();
  pass.embedding = {Eigen::VectorXd(total_dim_), "ensemble"};
  pass.members.resize(image_members_.size());
  const int views = std::max(augmentations_, 1);

  for (std::size_t m = 0; m < image_members_.size(); ++m) {
    const auto& member = *image_members_[m];
    auto& mp = pass.members[m];
    const int res = member.input_resolution();
    if (res != image.height() || res != image.width()) {
      mp.resize = resize_operator(image.height(), image.width(), res, res);
    }
    mp.mean = Eigen::VectorXd::Zero(member.embed_dim());
    for (int a = 0; a < views; ++a) {
      SamplingChain chain;
      if (augmentations_ > 0) {
        const auto params = sample_augmentation(
            spec_, image.height(), image.width(),
            derive_key({draw_base, static_cast<std::uint64_t>(m), static_cast<std::uint64_t>(a)}));
        chain = augmentation_chain(params, image.height(), image.width());
      }
      Tensor view = chain.empty() ? image.pixels() : chain.apply(image.pixels());
      if (mp.resize) view = mp.resize->apply(view);
      Image input = Image::clamped(std::move(view));
      mp.mean += member.encode_image(input).values;
      mp.chains.push_back(std::move(chain));
      mp.inputs.push_back(std::move(input));
    }
    mp.mean /= views;
    pass.embedding.values.segment(offsets_[m], member.embed_dim()) =
        normalize_ ? l2_normalize(mp.mean) : mp.mean;
  }
  return pass;
}

Tensor EnsembleEmbedder::backward(const Pass& pass, const Eigen::VectorXd& grad) const {
  if (grad.size() != total_dim_) throw InvalidArgument("ensemble backward: gradient size mismatch");
  Tensor out(3, pass.height, pass.width);
  for (std::size_t m = 0; m < image_members_.size(); ++m) {
    const auto& member = *image_members_[m];
    const auto& mp = pass.members[m];
    const auto g_slice = grad.segment(offsets_[m], member.embed_dim());
    Eigen::VectorXd g_mean = normalize_ ? l2_normalize_vjp(mp.mean, g_slice) : Eigen::VectorXd(g_slice);
    g_mean /= static_cast<double>(mp.inputs.size());
    for (std::size_t a = 0; a < mp.inputs.size(); ++a) {
      Tensor g = member.encode_image_vjp(mp.inputs[a], g_mean);
      if (mp.resize) g = mp.resize->apply_adjoint(g);
      if (!mp.chains[a].empty()) g = mp.chains[a].apply_adjoint(g);
      out.data() += g.data();
    }
  }
  return out;
}

EnsembleEmbedder EnsembleEmbedder::first_members(std::size_t count) const {
  if (count == 0 || count > image_members_.size()) {
    throw InvalidArgument("first_members: count must be in [1, " +
                          std::to_string(image_members_.size()) + "]");
  }
  return EnsembleEmbedder({image_members_.begin(), image_members_.begin() + count},
                          {text_members_.begin(), text_members_.begin() + count}, augmentations_,
                          spec_, normalize_);
}

EnsembleEmbedder EnsembleEmbedder::with_augmentations(int augmentations) const {
  return EnsembleEmbedder(image_members_, text_members_, augmentations, spec_, normalize_);
}

EmbeddingVector ensemble_embed_image(const Image& image, const EnsembleEmbedder& ensemble,
                                     std::uint64_t draw_base) {
  return ensemble.embed_image(image, draw_base);
}

EmbeddingVector ensemble_embed_text(const std::string& text, const EnsembleEmbedder& ensemble) {
  return ensemble.embed_text(text);
}

}  // namespace flexit
