#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mdpass/image.hpp"

namespace mdpass {

enum class DimensionKind : std::uint8_t { kText = 0x01, kImage = 0x02 };

std::string_view to_string(DimensionKind kind);
/// Accepts "text" / "image"; throws Error(kInvalidSpec) otherwise.
DimensionKind parse_dimension_kind(std::string_view name);

struct DimensionSpec {
  std::string id;
  DimensionKind kind = DimensionKind::kText;
  std::string label;
  std::uint64_t option_count = 1;

  friend bool operator==(const DimensionSpec&, const DimensionSpec&) = default;
};

/// Ordered, immutable list of dimensions. The order is the sequence in which
/// values must be supplied.
class CredentialSpec {
 public:
  static constexpr std::size_t kMaxDimensions = 64;

  /// Throws Error(kInvalidSpec) on an empty or oversized list, duplicate or
  /// empty ids, empty labels, or option_count == 0.
  explicit CredentialSpec(std::vector<DimensionSpec> dimensions);

  std::span<const DimensionSpec> dimensions() const noexcept { return dimensions_; }
  std::size_t size() const noexcept { return dimensions_.size(); }

  friend bool operator==(const CredentialSpec&, const CredentialSpec&) = default;

 private:
  std::vector<DimensionSpec> dimensions_;
};

/// One supplied input. Text payloads are normalized on construction.
class DimensionValue {
 public:
  static DimensionValue text(std::string_view raw);
  static DimensionValue image(GrayImage image);

  DimensionKind kind() const noexcept {
    return std::holds_alternative<std::string>(payload_) ? DimensionKind::kText
                                                         : DimensionKind::kImage;
  }
  const std::string& text_value() const { return std::get<std::string>(payload_); }
  const GrayImage& image_value() const { return std::get<GrayImage>(payload_); }

 private:
  explicit DimensionValue(std::variant<std::string, GrayImage> payload)
      : payload_(std::move(payload)) {}

  std::variant<std::string, GrayImage> payload_;
};

struct GroupedInputs {
  std::vector<const DimensionValue*> texts;
  std::vector<const DimensionValue*> images;
};

/// Stable partition by kind. Throws Error(kNoInputs) on an empty list.
GroupedInputs group_inputs(std::span<const DimensionValue> values);

/// Canonical framing of an ordered value list:
///   per dimension: kind tag (1 byte) | payload length (u32 BE) | payload
/// Text payload is the normalized UTF-8; image payload is the Feature64 as
/// u64 BE.
struct CredentialMaterial {
  std::vector<std::uint8_t> bytes;
};

struct MaterialEntry {
  DimensionKind kind;
  std::vector<std::uint8_t> payload;

  friend bool operator==(const MaterialEntry&, const MaterialEntry&) = default;
};

/// Throws Error(kSpecMismatch) when lengths or kinds disagree position-wise.
CredentialMaterial combine(const CredentialSpec& spec, std::span<const DimensionValue> values);

/// Inverse of the framing; throws Error(kInvalidSpec) on malformed bytes.
std::vector<MaterialEntry> decode_material(std::span<const std::uint8_t> bytes);

using Salt = std::array<std::uint8_t, 16>;
using Digest = std::array<std::uint8_t, 32>;

struct PasswordDigest {
  static constexpr std::uint8_t kVersion = 0x01;

  Salt salt{};
  Digest digest{};
  std::uint8_t version = kVersion;

  std::string digest_hex() const;
  friend bool operator==(const PasswordDigest&, const PasswordDigest&) = default;
};

Salt random_salt();

/// digest = SHA-256(version | salt | combine(spec, values)). Pure.
PasswordDigest generate_password(const Salt& salt, const CredentialSpec& spec,
                                 std::span<const DimensionValue> values);

/// Recomputes with the record's salt and compares digests in constant time.
/// Pipeline errors propagate as exceptions, so a malformed input is never
/// reported as a plain mismatch.
bool verify(const PasswordDigest& record, const CredentialSpec& spec,
            std::span<const DimensionValue> values);

}  // namespace mdpass
