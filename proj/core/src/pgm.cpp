#include "mdpass/pgm.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <string>
#include <string_view>

#include "mdpass/error.hpp"

namespace mdpass {
namespace {

constexpr std::size_t kMaxFileBytes = GrayImage::kMaxImagePixels * 4 + 4096;

bool is_space(std::uint8_t c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

[[noreturn]] void fail(const std::string& what) {
  throw Error(ErrorCode::kInvalidImage, "pgm: " + what);
}

class Cursor {
 public:
  explicit Cursor(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  // Next whitespace-delimited token, skipping comments.
  std::string_view token() {
    for (;;) {
      while (pos_ < bytes_.size() && is_space(bytes_[pos_])) ++pos_;
      if (pos_ < bytes_.size() && bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
        continue;
      }
      break;
    }
    const std::size_t start = pos_;
    while (pos_ < bytes_.size() && !is_space(bytes_[pos_]) && bytes_[pos_] != '#') ++pos_;
    return {reinterpret_cast<const char*>(bytes_.data()) + start, pos_ - start};
  }

  std::size_t number(const char* what) {
    const std::string_view t = token();
    std::size_t value = 0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (t.empty() || ec != std::errc{} || end != t.data() + t.size()) {
      fail(std::string("bad ") + what);
    }
    return value;
  }

  std::size_t pos() const { return pos_; }
  void skip(std::size_t n) { pos_ += n; }
  std::span<const std::uint8_t> bytes() const { return bytes_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

GrayImage parse_pgm(std::span<const std::uint8_t> bytes) {
  Cursor cur(bytes);
  const std::string_view magic = cur.token();
  const bool binary = magic == "P5";
  if (!binary && magic != "P2") fail("magic must be P5 or P2");

  const std::size_t width = cur.number("width");
  const std::size_t height = cur.number("height");
  const std::size_t maxval = cur.number("maxval");
  if (maxval != 255) fail("maxval must be 255");
  if (width < GrayImage::kMinSide || height < GrayImage::kMinSide) {
    throw Error(ErrorCode::kImageTooSmall, "image must be at least 8x8");
  }
  if (width > GrayImage::kMaxImagePixels / height) {
    throw Error(ErrorCode::kImageTooLarge, "image exceeds 16 MiB of pixels");
  }

  const std::size_t count = width * height;
  std::vector<std::uint8_t> pixels;
  pixels.reserve(count);
  if (binary) {
    // Exactly one whitespace byte separates maxval from the raster.
    if (cur.pos() >= bytes.size() || !is_space(bytes[cur.pos()])) fail("missing raster separator");
    cur.skip(1);
    if (bytes.size() - cur.pos() < count) fail("truncated raster");
    const auto raster = bytes.subspan(cur.pos(), count);
    pixels.assign(raster.begin(), raster.end());
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t v = cur.number("sample");
      if (v > 255) fail("sample exceeds maxval");
      pixels.push_back(static_cast<std::uint8_t>(v));
    }
  }
  return GrayImage(width, height, std::move(pixels));
}

GrayImage read_pgm_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::error_code ec;
  const auto size = std::filesystem::file_size(path, ec);
  if (!ec && size > kMaxFileBytes) {
    throw Error(ErrorCode::kImageTooLarge, "'" + path.string() + "' exceeds the image size limit");
  }
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                        std::istreambuf_iterator<char>());
  return parse_pgm(bytes);
}

std::vector<std::uint8_t> encode_pgm(const GrayImage& image) {
  const std::string header = "P5\n" + std::to_string(image.width()) + " " +
                             std::to_string(image.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), image.pixels().begin(), image.pixels().end());
  return out;
}

}  // namespace mdpass
