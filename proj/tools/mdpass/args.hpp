#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdpass/credential.hpp"

namespace mdpass::cli {

enum class OutputMode { kHuman, kJson, kCsv };

/// Exit codes shared by every subcommand.
enum ExitCode : int { kOk = 0, kNegative = 1, kUsage = 2, kTransport = 3 };

/// Thrown for bad flag values; maps to kUsage.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct GlobalOptions {
  OutputMode output = OutputMode::kHuman;
  std::string data;
  std::string bind = "127.0.0.1:8080";
};

/// "a..b", "a..b:step" or a single "a". Inclusive; step >= 1.
std::vector<std::uint64_t> parse_range(const std::string& text);

/// "100" or "3,4,5".
std::vector<std::uint64_t> parse_count_list(const std::string& text);

/// One `--dim KIND[:ID[:OPTIONS]]=VALUE` argument. VALUE is the text itself
/// for text dimensions and a PGM path for image dimensions.
struct DimArg {
  DimensionKind kind = DimensionKind::kText;
  std::string id;
  std::uint64_t option_count = 1;
  std::string value;
};

DimArg parse_dim(const std::string& text, std::size_t position);

}  // namespace mdpass::cli
