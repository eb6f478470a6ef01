#include "mdpass/image.hpp"

#include <array>
#include <cstdio>

#include "mdpass/error.hpp"

namespace mdpass {

GrayImage::GrayImage(std::size_t width, std::size_t height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  if (width_ < kMinSide || height_ < kMinSide) {
    throw Error(ErrorCode::kImageTooSmall, "image must be at least 8x8, got " +
                                               std::to_string(width_) + "x" +
                                               std::to_string(height_));
  }
  if (width_ > kMaxImagePixels / height_) {
    throw Error(ErrorCode::kImageTooLarge, "image exceeds 16 MiB of pixels");
  }
  if (pixels_.size() != width_ * height_) {
    throw Error(ErrorCode::kInvalidImage, "pixel count does not match dimensions");
  }
}

std::string Feature64::to_hex() const {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(bits));
  return buf;
}

Feature64 extract_image_feature(const GrayImage& image) {
  const std::size_t w = image.width();
  const std::size_t h = image.height();
  if (w < GrayImage::kMinSide || h < GrayImage::kMinSide) {
    throw Error(ErrorCode::kImageTooSmall, "image must be at least 8x8");
  }

  std::array<std::uint64_t, 64> cells{};
  std::uint64_t total = 0;
  for (std::size_t r = 0; r < 8; ++r) {
    const std::size_t y0 = r * h / 8;
    const std::size_t y1 = (r + 1) * h / 8;
    for (std::size_t c = 0; c < 8; ++c) {
      const std::size_t x0 = c * w / 8;
      const std::size_t x1 = (c + 1) * w / 8;
      std::uint64_t sum = 0;
      for (std::size_t y = y0; y < y1; ++y) {
        const auto row = image.pixels().subspan(y * w + x0, x1 - x0);
        for (std::uint8_t p : row) sum += p;
      }
      cells[r * 8 + c] = sum / ((y1 - y0) * (x1 - x0));
      total += cells[r * 8 + c];
    }
  }

  Feature64 feature;
  for (std::uint64_t v : cells) {
    feature.bits = (feature.bits << 1) | (64 * v > total ? 1u : 0u);
  }
  return feature;
}

}  // namespace mdpass
