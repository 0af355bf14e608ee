#pragma once

#include <filesystem>
#include <string>

#include "synthsusp/image_grid.hpp"

namespace synthsusp {

/// Reads a .sgrid file: one UTF-8 JSON header line terminated by '\n'
/// ({"magic":"SGRID1", width, height, channels, spacing, origin, center}),
/// followed by width*height*channels little-endian float32 values, channel-
/// major then row-major. Trailing bytes are rejected.
ImageGrid load_grid(const std::filesystem::path& path);

/// Writes the .sgrid representation. save_grid followed by load_grid
/// reproduces the grid bit-exactly.
void save_grid(const ImageGrid& grid, const std::filesystem::path& path);

/// In-memory .sgrid serialization (same bytes as save_grid would write).
std::string serialize_grid(const ImageGrid& grid);
ImageGrid parse_grid(const std::string& bytes, const std::string& origin_label);

}  // namespace synthsusp
