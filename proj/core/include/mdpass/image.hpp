#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace mdpass {

/// 8-bit grayscale raster, row-major. Construction enforces the size limits:
/// at least 8x8 (kImageTooSmall) and at most kMaxImagePixels (kImageTooLarge).
class GrayImage {
 public:
  static constexpr std::size_t kMinSide = 8;
  static constexpr std::size_t kMaxImagePixels = std::size_t{16} << 20;

  GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels);

  std::size_t width() const noexcept { return width_; }
  std::size_t height() const noexcept { return height_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::uint8_t at(std::size_t x, std::size_t y) const { return pixels_[y * width_ + x]; }

  friend bool operator==(const GrayImage&, const GrayImage&) = default;

 private:
  std::size_t width_;
  std::size_t height_;
  std::vector<std::uint8_t> pixels_;
};

/// 64-bit image feature; cell (0,0) is the most significant bit.
struct Feature64 {
  std::uint64_t bits = 0;

  std::string to_hex() const;
  friend bool operator==(Feature64, Feature64) = default;
};

/// 8x8 block-average hash. Cell (r, c) spans rows [r*H/8, (r+1)*H/8) and
/// columns [c*W/8, (c+1)*W/8); its value is the floored mean intensity. A
/// cell's bit is set iff 64 * value > sum of all 64 cell values.
/// Integer arithmetic only.
Feature64 extract_image_feature(const GrayImage& image);

/// Integer luma used at the color boundary: (299R + 587G + 114B + 500) / 1000.
constexpr std::uint8_t rgb_to_luma(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299u * r + 587u * g + 114u * b + 500u) / 1000u);
}

}  // namespace mdpass
