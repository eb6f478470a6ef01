#pragma once

#include <string>
#include <string_view>

namespace mdpass {

/// NFC-normalizes UTF-8 `raw` and strips leading/trailing Unicode
/// White_Space. Case is preserved.
///
/// Throws Error(kInvalidText) on malformed UTF-8 and Error(kEmptyText) when
/// nothing remains after trimming.
std::string normalize_text(std::string_view raw);

}  // namespace mdpass
