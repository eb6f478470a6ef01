#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "mdpass/auth_types.hpp"

namespace mdpass::auth {

/// Every log line carries this schema version in its "v" field.
inline constexpr int kLogSchemaVersion = 1;

/// One JSON object, no trailing newline. Only salt and digest of a
/// credential are written; raw inputs never reach the log.
std::string encode_record(const LogRecord& record);

/// Throws Error(kCorruptLog) on malformed lines and Error(kSchemaVersion) on
/// a version other than kLogSchemaVersion.
LogRecord decode_record(std::string_view line);

struct LoadResult {
  std::vector<LogRecord> records;
  std::vector<std::string> warnings;
  std::uintmax_t intact_bytes = 0;  // length of the prefix that replayed cleanly
};

/// Replays the log at `path`. A missing or empty file is an empty log. A
/// damaged final line (unterminated or unparseable) is dropped with a
/// warning; damage anywhere else throws Error(kCorruptLog).
LoadResult load_log(const std::filesystem::path& path);

/// Append-only JSON-lines log. Opening replays the file and cuts off a
/// damaged tail so later appends start on a clean line.
class RecordLog {
 public:
  explicit RecordLog(std::filesystem::path path);

  const std::filesystem::path& path() const noexcept { return path_; }
  const LoadResult& loaded() const noexcept { return loaded_; }

  /// Writes and flushes one line. Throws Error(kIo) on failure.
  void append(const LogRecord& record);

 private:
  std::filesystem::path path_;
  LoadResult loaded_;
  std::ofstream out_;
};

}  // namespace mdpass::auth
