#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mdpass/image.hpp"

namespace mdpass {

/// Parses a P5 (binary) or P2 (ASCII) graymap with maxval 255. Header tokens
/// are whitespace separated and may be interleaved with `#` comments.
/// Throws Error(kInvalidImage) on malformed input; size limits come from
/// GrayImage.
GrayImage parse_pgm(std::span<const std::uint8_t> bytes);

GrayImage read_pgm_file(const std::filesystem::path& path);

/// Binary P5 encoding.
std::vector<std::uint8_t> encode_pgm(const GrayImage& image);

}  // namespace mdpass
