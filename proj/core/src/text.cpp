#include "mdpass/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/ustring.h>

#include "mdpass/error.hpp"

namespace mdpass {
namespace {

bool is_valid_utf8(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  int32_t needed = 0;
  u_strFromUTF8(nullptr, 0, &needed, s.data(), static_cast<int32_t>(s.size()), &status);
  return status == U_BUFFER_OVERFLOW_ERROR || U_SUCCESS(status);
}

}  // namespace

std::string normalize_text(std::string_view raw) {
  if (!is_valid_utf8(raw)) {
    throw Error(ErrorCode::kInvalidText, "text is not valid UTF-8");
  }

  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* nfc = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidText, u_errorName(status));
  }
  const icu::UnicodeString source = icu::UnicodeString::fromUTF8(
      icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size())));
  icu::UnicodeString normalized = nfc->normalize(source, status);
  if (U_FAILURE(status)) {
    throw Error(ErrorCode::kInvalidText, u_errorName(status));
  }

  int32_t begin = 0;
  int32_t end = normalized.length();
  while (begin < end && u_isUWhiteSpace(normalized.char32At(begin))) {
    begin = normalized.moveIndex32(begin, 1);
  }
  while (end > begin) {
    const int32_t prev = normalized.moveIndex32(end, -1);
    if (!u_isUWhiteSpace(normalized.char32At(prev))) break;
    end = prev;
  }
  if (begin == end) {
    throw Error(ErrorCode::kEmptyText, "text is empty after trimming");
  }

  std::string out;
  normalized.tempSubStringBetween(begin, end).toUTF8String(out);
  return out;
}

}  // namespace mdpass
