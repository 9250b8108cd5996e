#include "flexit/dataset/image_index.hpp"

#include <nlohmann/json.hpp>

#include <fstream>

#include "flexit/core/errors.hpp"
#include "flexit/core/png_io.hpp"

namespace flexit {

namespace {

std::map<std::string, std::vector<std::string>> read_split(const nlohmann::json& j,
                                                            const char* key) {
  std::map<std::string, std::vector<std::string>> out;
  if (!j.contains(key)) return out;
  if (!j[key].is_object()) throw SchemaError(std::string("image index: '") + key + "' must be an object");
  for (const auto& [label, paths] : j[key].items()) {
    if (!paths.is_array()) throw SchemaError("image index: '" + label + "' must list paths");
    out[label] = paths.get<std::vector<std::string>>();
  }
  return out;
}

}  // namespace

const std::vector<std::string>& ImageIndex::val_images(const std::string& label) const {
  const auto it = val.find(label);
  if (it == val.end() || it->second.empty()) {
    throw MissingData("no validation images for label '" + label + "'");
  }
  return it->second;
}

Image ImageIndex::load(const std::string& image_id) const { return read_png(resolve(image_id)); }

void ImageIndex::require_validation_images(const ClusterRegistry& registry) const {
  for (const auto& label : registry.labels()) val_images(label);
}

ImageIndex load_image_index(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingData("cannot open image index " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
  if (!j.is_object()) throw SchemaError("image index must be a JSON object");
  ImageIndex index;
  index.root = path.parent_path();
  index.val = read_split(j, "val");
  index.train = read_split(j, "train");
  if (j.contains("prototypes")) {
    index.prototypes = j["prototypes"].get<std::map<std::string, std::string>>();
  }
  return index;
}

void write_image_index(const std::filesystem::path& path, const ImageIndex& index) {
  nlohmann::ordered_json j;
  j["val"] = index.val;
  j["train"] = index.train;
  if (!index.prototypes.empty()) j["prototypes"] = index.prototypes;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw MissingData("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace flexit
