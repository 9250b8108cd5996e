#pragma once

#include <string>

namespace flexit {

/// One editing request S -> T applied to a validation image.
struct TransformQuery {
  std::string id;
  std::string image_id;      // path of the input image, relative to the image root
  std::string source_text;
  std::string target_text;
  std::string cluster_id;
  std::string source_label;
  std::string target_label;

  friend bool operator==(const TransformQuery&, const TransformQuery&) = default;
};

}  // namespace flexit
