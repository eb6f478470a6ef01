#include "mdpass/probability.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <nlohmann/json.hpp>

#include "mdpass/error.hpp"

namespace mdpass::prob {
namespace {

BigInt pow10(unsigned k) {
  BigInt r = 1;
  for (unsigned i = 0; i < k; ++i) r *= 10;
  return r;
}

unsigned decimal_digits(const BigInt& v) { return static_cast<unsigned>(v.str().size()); }

std::string format_log10(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return buf;
}

using Float50 = boost::multiprecision::cpp_bin_float_50;

}  // namespace

double log10_reciprocal(const BigInt& denominator) {
  const double v = -boost::multiprecision::log10(Float50(denominator)).convert_to<double>();
  return v == 0.0 ? 0.0 : v;
}

ProbabilityQuery::ProbabilityQuery(std::size_t n, std::vector<std::uint64_t> options)
    : options_(std::move(options)) {
  if (n < 1) throw Error(ErrorCode::kInvalidQuery, "number of inputs must be >= 1");
  if (options_.size() != n) {
    throw Error(ErrorCode::kInvalidQuery, "expected " + std::to_string(n) +
                                              " option counts, got " +
                                              std::to_string(options_.size()));
  }
  if (std::ranges::any_of(options_, [](std::uint64_t v) { return v < 1; })) {
    throw Error(ErrorCode::kInvalidQuery, "option counts must be >= 1");
  }
}

ProbabilityQuery ProbabilityQuery::uniform(std::size_t n, std::uint64_t options_per_input) {
  return ProbabilityQuery(n, std::vector<std::uint64_t>(n, options_per_input));
}

ProbabilityQuery ProbabilityQuery::broadcast(std::size_t n, std::vector<std::uint64_t> options) {
  if (options.size() == 1 && n > 1) return uniform(n, options.front());
  return ProbabilityQuery(n, std::move(options));
}

BigInt search_space(const ProbabilityQuery& query) {
  BigInt space = query.inputs();
  for (std::uint64_t n : query.options()) space *= n;
  return space;
}

std::string format_reciprocal(const BigInt& denominator) {
  if (denominator < 1) throw Error(ErrorCode::kInvalidQuery, "denominator must be >= 1");

  // Pick k so that round(10^k / d) has six digits; then 1/d = m * 10^-k.
  unsigned k = decimal_digits(denominator) + 5;
  BigInt m;
  for (;;) {
    const BigInt scaled = pow10(k);
    BigInt q = scaled / denominator;
    const BigInt rem = scaled % denominator;
    if (2 * rem >= denominator) ++q;
    if (q >= 1000000) {
      --k;
      continue;
    }
    if (q < 100000) {
      ++k;
      continue;
    }
    m = q;
    break;
  }

  std::string digits = m.str();
  const int exponent = 5 - static_cast<int>(k);
  while (digits.size() > 1 && digits.back() == '0') digits.pop_back();

  std::string out(1, digits[0]);
  if (digits.size() > 1) out += "." + digits.substr(1);
  char exp[16];
  std::snprintf(exp, sizeof exp, "E%c%02d", exponent < 0 ? '-' : '+', std::abs(exponent));
  return out + exp;
}

HackProbabilityReport hack_probability(const ProbabilityQuery& query) {
  HackProbabilityReport report;
  report.search_space = search_space(query);
  report.probability = Rational(BigInt(1), report.search_space);
  report.value = Float50(report.probability).convert_to<double>();
  report.log10_value = log10_reciprocal(report.search_space);
  report.formatted = format_reciprocal(report.search_space);
  return report;
}

std::string report_json(const ProbabilityQuery& query, const HackProbabilityReport& report) {
  const nlohmann::json j = {
      {"inputs", query.inputs()},
      {"options", std::vector<std::uint64_t>(query.options().begin(), query.options().end())},
      {"search_space", report.search_space.str()},
      {"probability", report.value},
      {"formatted", report.formatted},
      {"log10", report.log10_value}};
  return j.dump();
}

std::vector<TableRow> table_vary_inputs(std::uint64_t options_per_input,
                                        std::vector<std::uint64_t> n_values) {
  if (n_values.empty()) throw Error(ErrorCode::kInvalidQuery, "no input counts given");
  std::ranges::sort(n_values);
  std::vector<TableRow> rows;
  for (std::uint64_t n : n_values) {
    if (n > ProbabilityQuery::kMaxInputs) throw Error(ErrorCode::kInvalidQuery, "input count too large");
    rows.push_back({n, hack_probability(ProbabilityQuery::uniform(n, options_per_input))});
  }
  return rows;
}

std::vector<TableRow> table_vary_options(std::size_t n, std::vector<std::uint64_t> option_values) {
  if (option_values.empty()) throw Error(ErrorCode::kInvalidQuery, "no option counts given");
  std::ranges::sort(option_values);
  std::vector<TableRow> rows;
  for (std::uint64_t options : option_values) {
    rows.push_back({options, hack_probability(ProbabilityQuery::uniform(n, options))});
  }
  return rows;
}

std::string plot_csv(std::span<const TableRow> rows) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidQuery, "no rows to emit");
  std::string out = "param,probability,log10_probability\n";
  for (const auto& row : rows) {
    out += std::to_string(row.param) + "," + row.report.formatted + "," +
           format_log10(row.report.log10_value) + "\n";
  }
  return out;
}

std::string plot_json(std::span<const TableRow> rows) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidQuery, "no rows to emit");
  nlohmann::json series = nlohmann::json::array();
  for (const auto& row : rows) {
    series.push_back({{"param", row.param},
                      {"probability", row.report.value},
                      {"log10", row.report.log10_value}});
  }
  return series.dump();
}

void write_text_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
  out << contents;
  out.flush();
  if (!out) throw Error(ErrorCode::kIo, "failed writing '" + path.string() + "'");
}

void emit_plot_data(std::span<const TableRow> rows, const std::filesystem::path& stem) {
  const std::string csv = plot_csv(rows);
  const std::string json = plot_json(rows);
  auto csv_path = stem;
  csv_path += ".csv";
  auto json_path = stem;
  json_path += ".json";
  write_text_file(csv_path, csv);
  write_text_file(json_path, json + "\n");
}

}  // namespace mdpass::prob
