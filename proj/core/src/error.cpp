#include "mdpass/error.hpp"

namespace mdpass {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kEmptyText: return "empty_text";
    case ErrorCode::kInvalidText: return "invalid_text";
    case ErrorCode::kImageTooSmall: return "image_too_small";
    case ErrorCode::kImageTooLarge: return "image_too_large";
    case ErrorCode::kInvalidImage: return "invalid_image";
    case ErrorCode::kNoInputs: return "no_inputs";
    case ErrorCode::kInvalidSpec: return "invalid_spec";
    case ErrorCode::kSpecMismatch: return "spec_mismatch";
    case ErrorCode::kInvalidQuery: return "invalid_query";
    case ErrorCode::kSpaceTooLarge: return "space_too_large";
    case ErrorCode::kValidation: return "validation_error";
    case ErrorCode::kUnknownOrg: return "unknown_org";
    case ErrorCode::kUnknownUser: return "unknown_user";
    case ErrorCode::kDuplicateUser: return "duplicate_user";
    case ErrorCode::kUnknownChallenge: return "unknown_challenge";
    case ErrorCode::kChallengeExpired: return "challenge_expired";
    case ErrorCode::kChallengeConsumed: return "challenge_consumed";
    case ErrorCode::kAuthFailed: return "auth_failed";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kSchemaVersion: return "schema_version";
    case ErrorCode::kCorruptLog: return "corrupt_log";
  }
  return "unknown";
}

}  // namespace mdpass
