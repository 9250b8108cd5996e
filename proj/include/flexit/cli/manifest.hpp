#pragma once

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace flexit {

struct ManifestEntry {
  std::string path;  // relative to the manifest's directory
  std::string hash;  // FNV-1a 64 of the file bytes, hex
  std::uintmax_t bytes = 0;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct Manifest {
  std::string command;
  std::string config_hash;
  std::vector<ManifestEntry> artifacts;  // sorted by path

  /// Hash over (path, hash) of every artifact.
  std::string content_hash() const;
};

std::string file_hash(const std::filesystem::path& path);

/// Hashes `files` (absolute or relative to `dir`) and writes dir/manifest.json.
Manifest write_manifest(const std::filesystem::path& dir, const std::string& command,
                        const std::string& config_hash, const std::vector<std::filesystem::path>& files);
Manifest read_manifest(const std::filesystem::path& path);

}  // namespace flexit
