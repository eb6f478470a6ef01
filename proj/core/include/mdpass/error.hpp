#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mdpass {

enum class ErrorCode {
  kEmptyText,
  kInvalidText,
  kImageTooSmall,
  kImageTooLarge,
  kInvalidImage,
  kNoInputs,
  kInvalidSpec,
  kSpecMismatch,
  kInvalidQuery,
  kSpaceTooLarge,
  kValidation,
  kUnknownOrg,
  kUnknownUser,
  kDuplicateUser,
  kUnknownChallenge,
  kChallengeExpired,
  kChallengeConsumed,
  kAuthFailed,
  kIo,
  kSchemaVersion,
  kCorruptLog,
};

/// Stable snake_case name, used in JSON error bodies and CLI messages.
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace mdpass
