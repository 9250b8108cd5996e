#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "flexit/backends/augment.hpp"
#include "flexit/backends/interfaces.hpp"
#include "flexit/core/resample.hpp"

namespace flexit {

/// Concatenation of several multimodal encoders. Each member's image embedding
/// is the mean over `augmentations` augmented views (raw image when 0), then
/// l2-normalized; member results are concatenated in a fixed order. The
/// concatenated vector itself is not renormalized.
class EnsembleEmbedder {
 public:
  struct MemberPass {
    std::vector<SamplingChain> chains;
    std::vector<Image> inputs;           // what the member actually encoded
    std::optional<SeparableOperator> resize; // image resolution -> member resolution
    Eigen::VectorXd mean;                // pre-normalization mean embedding
  };

  /// Cached forward state needed by backward().
  struct Pass {
    int height = 0;
    int width = 0;
    std::vector<MemberPass> members;
    EmbeddingVector embedding;
  };

  EnsembleEmbedder(std::vector<std::shared_ptr<const ImageEmbedder>> image_members,
                   std::vector<std::shared_ptr<const TextEncoder>> text_members,
                   int augmentations, AugmentationSpec spec, bool normalize_members = true);

  std::size_t size() const noexcept { return image_members_.size(); }
  int total_dim() const noexcept { return total_dim_; }
  int augmentations() const noexcept { return augmentations_; }
  const AugmentationSpec& augmentation_spec() const noexcept { return spec_; }
  bool normalizes_members() const noexcept { return normalize_; }
  const std::vector<std::shared_ptr<const ImageEmbedder>>& image_members() const noexcept {
    return image_members_;
  }
  const std::vector<std::shared_ptr<const TextEncoder>>& text_members() const noexcept {
    return text_members_;
  }

  EmbeddingVector embed_text(const std::string& text) const;
  /// `draw_base` selects the augmentation draws (the optimizer passes the step).
  EmbeddingVector embed_image(const Image& image, std::uint64_t draw_base) const;

  Pass forward(const Image& image, std::uint64_t draw_base) const;
  /// Gradient of <grad, embedding> with respect to the input pixels.
  Tensor backward(const Pass& pass, const Eigen::VectorXd& grad) const;

  /// Same ensemble restricted to its first `count` members.
  EnsembleEmbedder first_members(std::size_t count) const;
  EnsembleEmbedder with_augmentations(int augmentations) const;

 private:
  std::vector<std::shared_ptr<const ImageEmbedder>> image_members_;
  std::vector<std::shared_ptr<const TextEncoder>> text_members_;
  std::vector<int> offsets_;
  int augmentations_;
  AugmentationSpec spec_;
  bool normalize_;
  int total_dim_ = 0;
};

/// Free-function forms of the ensemble operations.
EmbeddingVector ensemble_embed_image(const Image& image, const EnsembleEmbedder& ensemble,
                                     std::uint64_t draw_base);
EmbeddingVector ensemble_embed_text(const std::string& text, const EnsembleEmbedder& ensemble);

}  // namespace flexit
