#include "args.hpp"

#include <charconv>

#include "mdpass/error.hpp"

namespace mdpass::cli {
namespace {

std::uint64_t to_count(std::string_view s, const std::string& whole) {
  std::uint64_t v = 0;
  const auto [end, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || end != s.data() + s.size()) {
    throw UsageError("not a non-negative integer in '" + whole + "'");
  }
  return v;
}

}  // namespace

std::vector<std::uint64_t> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  if (dots == std::string::npos) return {to_count(text, text)};

  const std::string_view sv(text);
  const auto colon = text.find(':', dots);
  const std::uint64_t first = to_count(sv.substr(0, dots), text);
  const std::uint64_t last = to_count(sv.substr(dots + 2, colon == std::string::npos ? std::string::npos
                                                                                     : colon - dots - 2),
                                      text);
  const std::uint64_t step = colon == std::string::npos ? 1 : to_count(sv.substr(colon + 1), text);
  if (step == 0) throw UsageError("range step must be >= 1 in '" + text + "'");
  if (last < first) throw UsageError("range end precedes start in '" + text + "'");
  if ((last - first) / step >= 100000) throw UsageError("range '" + text + "' has too many values");
  std::vector<std::uint64_t> out;
  for (std::uint64_t v = first; v <= last; v += step) {
    out.push_back(v);
    if (last - v < step) break;
  }
  return out;
}

std::vector<std::uint64_t> parse_count_list(const std::string& text) {
  std::vector<std::uint64_t> out;
  std::size_t pos = 0;
  for (;;) {
    const auto comma = text.find(',', pos);
    out.push_back(to_count(std::string_view(text).substr(pos, comma - pos), text));
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  return out;
}

DimArg parse_dim(const std::string& text, std::size_t position) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw UsageError("--dim needs KIND[:ID[:OPTIONS]]=VALUE, got '" + text + "'");
  DimArg dim;
  dim.value = text.substr(eq + 1);

  std::vector<std::string> head;
  std::size_t pos = 0;
  const std::string spec = text.substr(0, eq);
  for (;;) {
    const auto colon = spec.find(':', pos);
    head.push_back(spec.substr(pos, colon - pos));
    if (colon == std::string::npos) break;
    pos = colon + 1;
  }
  if (head.size() > 3) throw UsageError("too many ':' fields in '" + text + "'");
  try {
    dim.kind = parse_dimension_kind(head[0]);
  } catch (const Error&) {
    throw UsageError("dimension kind must be text or image in '" + text + "'");
  }
  dim.id = head.size() > 1 && !head[1].empty() ? head[1] : "dim" + std::to_string(position);
  if (head.size() > 2) dim.option_count = to_count(head[2], text);
  return dim;
}

}  // namespace mdpass::cli
