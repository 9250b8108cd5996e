#pragma once

#include <filesystem>

#include "flexit/core/types.hpp"

namespace flexit {

/// Reads an 8-bit PNG (gray, RGB or with alpha, which is dropped) into [0, 1].
Image read_png(const std::filesystem::path& path);

/// Writes 8-bit RGB; values are mapped with round(255 * v).
void write_png(const std::filesystem::path& path, const Image& image);

}  // namespace flexit
