#include "flexit/cli/manifest.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iterator>

#include "flexit/core/errors.hpp"
#include "flexit/core/random.hpp"

namespace flexit {

namespace {

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

}  // namespace

std::string file_hash(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingData("cannot read " + path.string());
  const std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return hex(fnv1a64(bytes));
}

std::string Manifest::content_hash() const {
  std::string text;
  for (const auto& a : artifacts) text += a.path + '\t' + a.hash + '\n';
  return hex(fnv1a64(text));
}

Manifest write_manifest(const std::filesystem::path& dir, const std::string& command,
                        const std::string& config_hash, const std::vector<std::filesystem::path>& files) {
  Manifest m{command, config_hash, {}};
  for (const auto& f : files) {
    const auto full = f.is_absolute() ? f : dir / f;
    m.artifacts.push_back({std::filesystem::relative(full, dir).generic_string(), file_hash(full),
                           std::filesystem::file_size(full)});
  }
  std::sort(m.artifacts.begin(), m.artifacts.end(),
            [](const auto& a, const auto& b) { return a.path < b.path; });
  nlohmann::ordered_json j;
  j["command"] = m.command;
  j["config_hash"] = m.config_hash;
  j["content_hash"] = m.content_hash();
  j["artifacts"] = nlohmann::ordered_json::array();
  for (const auto& a : m.artifacts) {
    j["artifacts"].push_back({{"path", a.path}, {"fnv1a64", a.hash}, {"bytes", a.bytes}});
  }
  std::filesystem::create_directories(dir);
  std::ofstream out(dir / "manifest.json");
  out << j.dump(2) << '\n';
  return m;
}

Manifest read_manifest(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw MissingData("cannot open manifest " + path.string());
  nlohmann::json j;
  try {
    in >> j;
    Manifest m{j.at("command"), j.at("config_hash"), {}};
    for (const auto& a : j.at("artifacts")) {
      m.artifacts.push_back({a.at("path"), a.at("fnv1a64"), a.at("bytes").get<std::uintmax_t>()});
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw SchemaError(path.string() + ": " + e.what());
  }
}

}  // namespace flexit
