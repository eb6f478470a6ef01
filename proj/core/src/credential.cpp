#include "mdpass/credential.hpp"

#include <openssl/crypto.h>
#include <openssl/evp.h>

#include <memory>
#include <unordered_set>

#include "mdpass/error.hpp"
#include "mdpass/hex.hpp"
#include "mdpass/random.hpp"
#include "mdpass/text.hpp"

namespace mdpass {
namespace {

void put_u32_be(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 24; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_u64_be(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int shift = 56; shift >= 0; shift -= 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

Digest sha256(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b,
              std::span<const std::uint8_t> c) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  Digest out{};
  unsigned int len = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), a.data(), a.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), b.data(), b.size()) != 1 ||
      EVP_DigestUpdate(ctx.get(), c.data(), c.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), out.data(), &len) != 1 || len != out.size()) {
    throw Error(ErrorCode::kIo, "sha256 failed");
  }
  return out;
}

}  // namespace

std::string_view to_string(DimensionKind kind) {
  return kind == DimensionKind::kText ? "text" : "image";
}

DimensionKind parse_dimension_kind(std::string_view name) {
  if (name == "text") return DimensionKind::kText;
  if (name == "image") return DimensionKind::kImage;
  throw Error(ErrorCode::kInvalidSpec, "unknown dimension kind '" + std::string(name) + "'");
}

CredentialSpec::CredentialSpec(std::vector<DimensionSpec> dimensions)
    : dimensions_(std::move(dimensions)) {
  if (dimensions_.empty()) throw Error(ErrorCode::kInvalidSpec, "spec needs at least one dimension");
  if (dimensions_.size() > kMaxDimensions) {
    throw Error(ErrorCode::kInvalidSpec, "spec exceeds 64 dimensions");
  }
  std::unordered_set<std::string> seen;
  for (const auto& d : dimensions_) {
    if (d.id.empty()) throw Error(ErrorCode::kInvalidSpec, "dimension id is empty");
    if (!seen.insert(d.id).second) {
      throw Error(ErrorCode::kInvalidSpec, "duplicate dimension id '" + d.id + "'");
    }
    if (d.label.empty()) throw Error(ErrorCode::kInvalidSpec, "dimension '" + d.id + "' has no label");
    if (d.option_count < 1) {
      throw Error(ErrorCode::kInvalidSpec, "dimension '" + d.id + "' needs option_count >= 1");
    }
  }
}

DimensionValue DimensionValue::text(std::string_view raw) {
  return DimensionValue(normalize_text(raw));
}

DimensionValue DimensionValue::image(GrayImage image) { return DimensionValue(std::move(image)); }

GroupedInputs group_inputs(std::span<const DimensionValue> values) {
  if (values.empty()) throw Error(ErrorCode::kNoInputs, "no inputs supplied");
  GroupedInputs groups;
  for (const auto& v : values) {
    (v.kind() == DimensionKind::kText ? groups.texts : groups.images).push_back(&v);
  }
  return groups;
}

CredentialMaterial combine(const CredentialSpec& spec, std::span<const DimensionValue> values) {
  if (values.size() != spec.size()) {
    throw Error(ErrorCode::kSpecMismatch, "expected " + std::to_string(spec.size()) +
                                              " values, got " + std::to_string(values.size()));
  }
  CredentialMaterial material;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const auto& dim = spec.dimensions()[i];
    const auto& value = values[i];
    if (value.kind() != dim.kind) {
      throw Error(ErrorCode::kSpecMismatch, "dimension '" + dim.id + "' expects " +
                                                std::string(to_string(dim.kind)));
    }
    auto& out = material.bytes;
    out.push_back(static_cast<std::uint8_t>(dim.kind));
    if (dim.kind == DimensionKind::kText) {
      const std::string& text = value.text_value();
      put_u32_be(out, static_cast<std::uint32_t>(text.size()));
      out.insert(out.end(), text.begin(), text.end());
    } else {
      put_u32_be(out, 8);
      put_u64_be(out, extract_image_feature(value.image_value()).bits);
    }
  }
  return material;
}

std::vector<MaterialEntry> decode_material(std::span<const std::uint8_t> bytes) {
  std::vector<MaterialEntry> entries;
  std::size_t pos = 0;
  while (pos < bytes.size()) {
    if (bytes.size() - pos < 5) throw Error(ErrorCode::kInvalidSpec, "truncated frame header");
    const std::uint8_t tag = bytes[pos];
    if (tag != 0x01 && tag != 0x02) throw Error(ErrorCode::kInvalidSpec, "unknown frame tag");
    std::uint32_t len = 0;
    for (int i = 1; i <= 4; ++i) len = (len << 8) | bytes[pos + i];
    pos += 5;
    if (bytes.size() - pos < len) throw Error(ErrorCode::kInvalidSpec, "truncated frame payload");
    if (tag == 0x02 && len != 8) throw Error(ErrorCode::kInvalidSpec, "image frame must be 8 bytes");
    entries.push_back({static_cast<DimensionKind>(tag),
                       {bytes.begin() + static_cast<std::ptrdiff_t>(pos),
                        bytes.begin() + static_cast<std::ptrdiff_t>(pos + len)}});
    pos += len;
  }
  return entries;
}

std::string PasswordDigest::digest_hex() const { return to_hex(digest); }

Salt random_salt() {
  Salt salt;
  secure_random(salt);
  return salt;
}

PasswordDigest generate_password(const Salt& salt, const CredentialSpec& spec,
                                 std::span<const DimensionValue> values) {
  const CredentialMaterial material = combine(spec, values);
  const std::uint8_t version[] = {PasswordDigest::kVersion};
  PasswordDigest out;
  out.salt = salt;
  out.digest = sha256(version, salt, material.bytes);
  return out;
}

bool verify(const PasswordDigest& record, const CredentialSpec& spec,
            std::span<const DimensionValue> values) {
  if (record.version != PasswordDigest::kVersion) {
    throw Error(ErrorCode::kSchemaVersion, "unsupported digest version");
  }
  const PasswordDigest candidate = generate_password(record.salt, spec, values);
  return CRYPTO_memcmp(candidate.digest.data(), record.digest.data(), record.digest.size()) == 0;
}

}  // namespace mdpass
