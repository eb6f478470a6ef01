#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace mdpass::prob {

using BigInt = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

/// n inputs, the i-th with options[i] candidate options.
class ProbabilityQuery {
 public:
  /// Upper bound on n accepted by the table and CLI front ends.
  static constexpr std::size_t kMaxInputs = 4096;

  /// Throws Error(kInvalidQuery) unless n >= 1, options.size() == n and
  /// every count is >= 1.
  ProbabilityQuery(std::size_t n, std::vector<std::uint64_t> options);

  /// n inputs sharing the same option count.
  static ProbabilityQuery uniform(std::size_t n, std::uint64_t options_per_input);

  /// A single count is shared by all n inputs; otherwise one count per input.
  static ProbabilityQuery broadcast(std::size_t n, std::vector<std::uint64_t> options);

  std::size_t inputs() const noexcept { return options_.size(); }
  std::span<const std::uint64_t> options() const noexcept { return options_; }

 private:
  std::vector<std::uint64_t> options_;
};

struct HackProbabilityReport {
  BigInt search_space;
  Rational probability;      // exactly 1 / search_space
  double value = 0.0;        // nearest double to `probability`
  double log10_value = 0.0;
  std::string formatted;     // e.g. "3.33333E-07"
};

struct TableRow {
  std::uint64_t param = 0;
  HackProbabilityReport report;
};

/// n * prod(N_i), exact.
BigInt search_space(const ProbabilityQuery& query);

HackProbabilityReport hack_probability(const ProbabilityQuery& query);

/// log10(1 / denominator), evaluated in 50-digit precision.
double log10_reciprocal(const BigInt& denominator);

/// {"inputs", "options", "search_space" (decimal string), "probability",
///  "formatted", "log10"}
std::string report_json(const ProbabilityQuery& query, const HackProbabilityReport& report);

/// Renders 1/denominator with six significant digits, scientific notation,
/// uppercase E, two-digit exponent minimum, trailing mantissa zeros removed:
/// 3.33333E-07, 2.5E-09, 2E-11, 1E+00. Rounds half up from the exact value.
std::string format_reciprocal(const BigInt& denominator);

/// One row per n with every input at `options_per_input`; rows ascend by n.
std::vector<TableRow> table_vary_inputs(std::uint64_t options_per_input,
                                        std::vector<std::uint64_t> n_values);

/// One row per option count with n inputs; rows ascend by option count.
std::vector<TableRow> table_vary_options(std::size_t n, std::vector<std::uint64_t> option_values);

/// CSV with header `param,probability,log10_probability`.
/// Throws Error(kInvalidQuery) on empty rows.
std::string plot_csv(std::span<const TableRow> rows);

/// JSON array of {"param", "probability", "log10"} objects.
std::string plot_json(std::span<const TableRow> rows);

/// Writes `<stem>.csv` and `<stem>.json`. Throws Error(kIo) naming the path.
void emit_plot_data(std::span<const TableRow> rows, const std::filesystem::path& stem);

/// Writes `contents` to `path`, throwing Error(kIo) naming the path.
void write_text_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace mdpass::prob
