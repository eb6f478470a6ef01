#pragma once

#include <nlohmann/json.hpp>

#include "mdpass/credential.hpp"
#include "mdpass/error.hpp"

namespace mdpass::detail {

inline nlohmann::json spec_to_json(std::span<const DimensionSpec> dims) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& d : dims) {
    out.push_back({{"id", d.id},
                   {"kind", std::string(to_string(d.kind))},
                   {"label", d.label},
                   {"option_count", d.option_count}});
  }
  return out;
}

/// Throws Error(kInvalidSpec) on shape errors as well as spec invariants.
inline CredentialSpec spec_from_json(const nlohmann::json& j) {
  if (!j.is_array()) throw Error(ErrorCode::kInvalidSpec, "spec must be an array");
  std::vector<DimensionSpec> dims;
  for (const auto& item : j) {
    if (!item.is_object() || !item.contains("id") || !item.contains("kind") ||
        !item["id"].is_string() || !item["kind"].is_string()) {
      throw Error(ErrorCode::kInvalidSpec, "each dimension needs string id and kind");
    }
    DimensionSpec d;
    d.id = item["id"].get<std::string>();
    d.kind = parse_dimension_kind(item["kind"].get<std::string>());
    d.label = item.value("label", d.id);
    if (!item.contains("option_count")) {
      d.option_count = 1;
    } else if (item["option_count"].is_number_unsigned()) {
      d.option_count = item["option_count"].get<std::uint64_t>();
    } else {
      throw Error(ErrorCode::kInvalidSpec, "option_count must be a positive integer");
    }
    dims.push_back(std::move(d));
  }
  return CredentialSpec(std::move(dims));
}

}  // namespace mdpass::detail
