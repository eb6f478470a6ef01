// Acceptance gate: one line per criterion, nonzero exit if any fails.

#include <httplib.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <nlohmann/json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "mdpass/attack.hpp"
#include "mdpass/auth_service.hpp"
#include "mdpass/error.hpp"
#include "mdpass/hex.hpp"
#include "mdpass/http_api.hpp"
#include "mdpass/image.hpp"
#include "mdpass/pgm.hpp"
#include "mdpass/probability.hpp"
#include "mdpass/store.hpp"
#include "support/oracles.hpp"
#include "support/random_ops.hpp"

namespace {

using namespace mdpass;
using nlohmann::json;
using prob::BigInt;
using prob::ProbabilityQuery;
using prob::Rational;

/// Collects failure messages for one criterion.
class Checker {
 public:
  void expect(bool ok, const std::string& what) {
    ++checks_;
    if (!ok && failures_.size() < 5) failures_.push_back(what);
    failed_ = failed_ || !ok;
  }
  bool failed() const { return failed_; }
  std::size_t checks() const { return checks_; }
  std::string summary() const {
    std::string s;
    for (const auto& f : failures_) s += (s.empty() ? "" : "; ") + f;
    return s;
  }

 private:
  std::vector<std::string> failures_;
  std::size_t checks_ = 0;
  bool failed_ = false;
};

struct Criterion {
  std::string name;
  double budget_seconds;
  std::function<void(Checker&)> body;
};

void table_criterion(Checker& c, const std::vector<prob::TableRow>& rows,
                     const std::vector<std::pair<std::uint64_t, std::string>>& expected,
                     const std::function<ProbabilityQuery(std::uint64_t)>& query_for) {
  c.expect(rows.size() == expected.size(), "row count");
  for (std::size_t i = 0; i < rows.size() && i < expected.size(); ++i) {
    const auto& [param, text] = expected[i];
    const auto& r = rows[i];
    const std::string tag = "param " + std::to_string(param);
    c.expect(r.param == param, tag + ": param");
    c.expect(r.report.formatted == text, tag + ": got " + r.report.formatted + ", want " + text);
    const double printed = std::stod(text);
    c.expect(std::abs(r.report.value - printed) <= 1e-5 * printed, tag + ": value outside 1e-5");
    c.expect(prob::hack_probability(query_for(param)).formatted == text, tag + ": direct query");
  }
}

/// Independent enumeration: odometer over every (rotation, options) tuple.
std::uint64_t odometer_successes(const std::vector<std::uint64_t>& options, std::uint64_t rotations,
                                 const std::vector<std::uint64_t>& secret, std::uint64_t& total) {
  std::uint64_t hits = 0;
  for (std::uint64_t rot = 0; rot < rotations; ++rot) {
    std::vector<std::uint64_t> digit(options.size(), 0);
    for (;;) {
      ++total;
      if (rot == 0 && digit == secret) ++hits;
      std::size_t i = 0;
      while (i < digit.size() && ++digit[i] == options[i]) digit[i++] = 0;
      if (i == digit.size()) break;
    }
  }
  return hits;
}

void exhaustive_oracle(Checker& c) {
  std::mt19937_64 rng(0x5eed);
  std::size_t cases = 0;
  for (std::size_t n = 1; n <= 3; ++n) {
    std::vector<std::uint64_t> options(n, 1);
    for (;;) {
      std::vector<std::uint64_t> secret(n);
      for (std::size_t i = 0; i < n; ++i) secret[i] = rng() % options[i];
      const ProbabilityQuery query(n, options);
      BigInt prod = 1;
      for (auto o : options) prod *= o;

      for (auto model : {sim::AttackerModel::kOptionsOnly, sim::AttackerModel::kPaperModel}) {
        const bool paper = model == sim::AttackerModel::kPaperModel;
        const auto e = sim::enumerate_space(query, model, secret);
        std::uint64_t oracle_total = 0;
        const auto oracle_hits = odometer_successes(options, paper ? n : 1, secret, oracle_total);
        const Rational rate(e.successes, e.total);
        const Rational closed = paper ? prob::hack_probability(query).probability : Rational(1, prod);
        std::string tag = "n=" + std::to_string(n) + " model=" + std::string(sim::to_string(model));
        for (auto o : options) tag += " " + std::to_string(o);
        c.expect(rate == closed, tag + ": enumeration rate != closed form");
        c.expect(e.total == oracle_total && e.successes == oracle_hits, tag + ": enumeration != odometer");
      }
      ++cases;

      std::size_t i = 0;
      while (i < n && ++options[i] > 12) options[i++] = 1;
      if (i == n) break;
    }
  }
  c.expect(cases >= 200, "fewer than 200 cases");
}

std::vector<std::pair<std::uint64_t, double>> read_plot_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  std::vector<std::pair<std::uint64_t, double>> rows;
  while (std::getline(in, line)) {
    const auto a = line.find(',');
    const auto b = line.rfind(',');
    rows.emplace_back(std::stoull(line.substr(0, a)), std::stod(line.substr(b + 1)));
  }
  return rows;
}

void monte_carlo(Checker& c) {
  const sim::SimulationConfig config{ProbabilityQuery::uniform(3, 5), sim::AttackerModel::kPaperModel, 2'000'000,
                                     20'240'601, 0};
  const auto report = sim::simulate(config);
  const double p = 1.0 / 375;
  const double bound = 3 * std::sqrt(p * (1 - p) / 2'000'000.0);
  char detail[160];
  std::snprintf(detail, sizeof detail, "empirical %.6e vs %.6e, bound %.3e", report.empirical, p, bound);
  c.expect(report.trials == 2'000'000, "trial count");
  c.expect(std::abs(report.empirical - p) <= bound, detail);
  c.expect(report.within_bound, std::string("report flags out of bound: ") + detail);

  testing::TempDir tmp;
  const auto fig7 = tmp.path() / "inputs";
  const auto fig8 = tmp.path() / "options";
  prob::emit_plot_data(prob::table_vary_inputs(100, {3, 4, 5}), fig7);
  prob::emit_plot_data(prob::table_vary_options(3, {100, 200, 300, 400, 500}), fig8);
  for (const auto& [stem, vary_inputs] : {std::pair{fig7, true}, std::pair{fig8, false}}) {
    const auto rows = read_plot_csv(stem.string() + ".csv");
    c.expect(rows.size() == (vary_inputs ? 3u : 5u), stem.filename().string() + ": row count");
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const double n = vary_inputs ? static_cast<double>(rows[i].first) : 3.0;
      const double big_n = vary_inputs ? 100.0 : static_cast<double>(rows[i].first);
      const double want = -(std::log10(n) + n * std::log10(big_n));
      c.expect(std::abs(rows[i].second - want) <= 1e-6, stem.filename().string() + ": log10 value");
      if (i > 0) c.expect(rows[i].second < rows[i - 1].second, stem.filename().string() + ": not decreasing");
    }
  }
}

void feature_goldens(Checker& c) {
  const auto hex = [](std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return std::string(buf);
  };
  c.expect(extract_image_feature(GrayImage(8, 8, std::vector<std::uint8_t>(64, 137))).bits == 0, "uniform != 0");
  std::vector<std::uint8_t> halves(64);
  for (std::size_t i = 0; i < 64; ++i) halves[i] = i % 8 < 4 ? 255 : 0;
  c.expect(extract_image_feature(GrayImage(8, 8, halves)).bits == 0xf0f0f0f0f0f0f0f0ULL, "halves");

  const auto goldens = testing::read_golden("features.txt");
  c.expect(goldens.size() >= 3, "fewer than 3 fixture goldens");
  c.expect(goldens.count("uniform.pgm") && goldens.at("uniform.pgm") == "0000000000000000", "uniform golden");
  c.expect(goldens.count("halves.pgm") && goldens.at("halves.pgm") == "f0f0f0f0f0f0f0f0", "halves golden");
  for (const auto& [name, want] : goldens) {
    const auto got = extract_image_feature(read_pgm_file(testing::fixture(name))).to_hex();
    c.expect(got == want, name + ": got " + got + ", want " + want);
  }

  std::mt19937_64 rng(0xfea7);
  for (int i = 0; i < 1000; ++i) {
    const auto img = testing::random_image(rng, 8, 32);
    const auto want = testing::brute_force_feature(img.width(), img.height(),
                                                   {img.pixels().begin(), img.pixels().end()});
    const auto got = extract_image_feature(img).bits;
    c.expect(got == want, "random " + std::to_string(img.width()) + "x" + std::to_string(img.height()) + ": " +
                              hex(got) + " vs " + hex(want));
  }
}

json image_json(const GrayImage& img) {
  const auto bytes = encode_pgm(img);
  return {{"kind", "image"}, {"pgm_base64", base64_encode(bytes)}};
}

json text_json(const std::string& s) { return {{"kind", "text"}, {"text", s}}; }

void end_to_end(Checker& c) {
  auth::AuthService service;
  auth::HttpServer http(service);
  const int port = http.bind("127.0.0.1", 0);
  http.start();
  httplib::Client client("127.0.0.1", port);
  const auto post = [&](const std::string& path, const json& body) {
    return client.Post(path, body.dump(), "application/json");
  };

  auto res = post("/api/orgs", {{"name", "PESIT"}, {"services", {"SaaS", "DSaaS"}}});
  if (!res || res->status != 201) return c.expect(false, "org enrollment");
  const std::string org = json::parse(res->body).at("org_id");
  res = post("/api/orgs/" + org + "/grants", {{"service", "SaaS"}, {"privileges", {"read"}}});
  c.expect(res && res->status == 201, "grant");

  const json spec = json::array({{{"id", "name"}, {"kind", "text"}, {"option_count", 100}},
                                 {{"id", "logo"}, {"kind", "image"}, {"option_count", 100}},
                                 {{"id", "signature"}, {"kind", "image"}, {"option_count", 100}},
                                 {{"id", "id"}, {"kind", "text"}, {"option_count", 100}}});
  const auto logo = read_pgm_file(testing::fixture("logo.pgm"));
  const auto signature = read_pgm_file(testing::fixture("signature.pgm"));
  const json values = json::array({text_json("PESIT"), image_json(logo), image_json(signature), text_json("ORG-0042")});
  res = post("/api/orgs/" + org + "/credentials", {{"user_id", "alice"}, {"spec", spec}, {"values", values}});
  c.expect(res && res->status == 201, "credential enrollment");

  const auto attempt = [&](const json& vals) -> httplib::Result {
    auto ch = post("/api/challenges", {{"org_id", org}, {"user_id", "alice"}});
    if (!ch || ch->status != 201) return ch;
    return post("/api/authenticate", {{"challenge_id", json::parse(ch->body).at("challenge_id")}, {"values", vals}});
  };

  res = attempt(values);
  std::string token;
  if (res && res->status == 200) token = json::parse(res->body).at("token");
  c.expect(token.size() == 32, "identical inputs did not yield a token");

  std::vector<std::pair<std::string, json>> wrong;
  std::vector<std::uint8_t> flipped(logo.pixels().begin(), logo.pixels().end());
  for (auto& p : flipped) p = static_cast<std::uint8_t>(255 - p);
  const json perturbed[4] = {text_json("PESlT"), image_json(GrayImage(logo.width(), logo.height(), flipped)),
                             image_json(read_pgm_file(testing::fixture("halves.pgm"))), text_json("ORG-0043")};
  for (std::size_t i = 0; i < 4; ++i) {
    json v = values;
    v[i] = perturbed[i];
    wrong.emplace_back("perturb dim " + std::to_string(i), v);
  }
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = i + 1; j < 4; ++j) {
      json v = values;
      std::swap(v[i], v[j]);
      wrong.emplace_back("swap " + std::to_string(i) + "," + std::to_string(j), v);
    }
  }

  for (const auto& [label, vals] : wrong) {
    res = attempt(vals);
    c.expect(res && res->status == 401 && res->body == R"({"error":"auth_failed"})", label + ": not uniform auth_failed");
  }

  // Token x agreed service x granted privilege.
  for (int cell = 0; cell < 8; ++cell) {
    const bool token_ok = cell & 1;
    const bool service_ok = cell & 2;
    const bool privilege_ok = cell & 4;
    const std::string path = std::string("/api/services/") + (service_ok ? "SaaS" : "IaaS") +
                             "?privilege=" + (privilege_ok ? "read" : "admin");
    const httplib::Headers headers = {{"Authorization", "Bearer " + (token_ok ? token : std::string(32, 'f'))}};
    res = client.Get(path, headers);
    const bool allow = res && res->status == 200 && json::parse(res->body).value("allow", false);
    const bool want = token_ok && service_ok && privilege_ok;
    c.expect(allow == want && res && res->status == (want ? 200 : 403), "truth table cell " + std::to_string(cell));
  }
  http.stop();
}

void monotonicity(Checker& c) {
  std::mt19937_64 rng(0x0d0e);
  std::uniform_int_distribution<std::size_t> pick_n(1, 8);
  std::uniform_int_distribution<std::uint64_t> pick_options(1, 1000);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t n = pick_n(rng);
    const std::uint64_t big_n = pick_options(rng);
    const auto base = prob::hack_probability(ProbabilityQuery::uniform(n, big_n)).probability;
    const auto more_inputs = prob::hack_probability(ProbabilityQuery::uniform(n + 1, big_n)).probability;
    c.expect(more_inputs < base, "n " + std::to_string(n) + "->" + std::to_string(n + 1) + " at N=" +
                                     std::to_string(big_n));

    std::vector<std::uint64_t> options(n);
    for (auto& o : options) o = pick_options(rng);
    const auto p = prob::hack_probability(ProbabilityQuery(n, options)).probability;
    for (std::size_t i = 0; i < n; ++i) {
      auto bumped = options;
      ++bumped[i];
      c.expect(prob::hack_probability(ProbabilityQuery(n, bumped)).probability < p,
               "N_" + std::to_string(i) + " increment");
    }
  }
}

std::vector<std::string> lines_of(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string line; std::getline(in, line);) out.push_back(line);
  return out;
}

void persistence(Checker& c) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    testing::TempDir tmp;
    const auto path = tmp.path() / "state.jsonl";
    std::mt19937_64 rng(seed);
    auth::ServiceState live;
    {
      auth::AuthService service(auth::AuthServiceOptions{path});
      testing::run_random_ops(service, rng, 40);
      live = service.snapshot();
    }
    auth::AuthService replayed(auth::AuthServiceOptions{path});
    c.expect(replayed.snapshot() == live, "seed " + std::to_string(seed) + ": replay differs");
    c.expect(replayed.load_warnings().empty(), "seed " + std::to_string(seed) + ": spurious warnings");
  }

  // Cut the final record mid-line, as a crash during append would.
  testing::TempDir tmp;
  const auto path = tmp.path() / "state.jsonl";
  std::mt19937_64 rng(99);
  {
    auth::AuthService service(auth::AuthServiceOptions{path});
    while (lines_of(testing::read_file(path)).size() < 5) testing::run_random_ops(service, rng, 10);
  }
  const auto full = testing::read_file(path);
  const auto lines = lines_of(full);
  auth::ServiceState expected;
  for (std::size_t i = 0; i + 1 < lines.size(); ++i) expected.apply(auth::decode_record(lines[i]));
  std::filesystem::resize_file(path, full.size() - lines.back().size() / 2 - 1);

  std::string org_after;
  {
    auth::AuthService recovered(auth::AuthServiceOptions{path});
    c.expect(recovered.snapshot() == expected, "truncated tail: state differs");
    c.expect(!recovered.load_warnings().empty(), "truncated tail: no warning");
    org_after = recovered.enroll_org("after-recovery", {"SaaS"}).org_id;
  }
  auth::AuthService reopened(auth::AuthServiceOptions{path});
  c.expect(reopened.load_warnings().empty(), "recovered log still damaged");
  c.expect(reopened.snapshot().orgs.count(org_after) == 1, "append after recovery lost");
}

}  // namespace

int main() {
  using Clock = std::chrono::steady_clock;

  const std::vector<Criterion> criteria = {
      {"table-1 probability for n=3..5, N=100", 1.0,
       [](Checker& c) {
         table_criterion(c, prob::table_vary_inputs(100, {3, 4, 5}),
                         {{3, "3.33333E-07"}, {4, "2.5E-09"}, {5, "2E-11"}},
                         [](std::uint64_t n) { return ProbabilityQuery::uniform(n, 100); });
       }},
      {"table-2 probability for n=3, N=100..500", 1.0,
       [](Checker& c) {
         table_criterion(c, prob::table_vary_options(3, {100, 200, 300, 400, 500}),
                         {{100, "3.33333E-07"},
                          {200, "4.16667E-08"},
                          {300, "1.23457E-08"},
                          {400, "5.20833E-09"},
                          {500, "2.66667E-09"}},
                         [](std::uint64_t big_n) { return ProbabilityQuery::uniform(3, big_n); });
       }},
      {"exhaustive enumeration equals closed form (n<=3, N_i<=12)", 30.0, exhaustive_oracle},
      {"monte-carlo n=3 N=5 paper model within 3 sigma; plot series decreasing", 60.0, monte_carlo},
      {"feature-hash goldens and brute-force agreement", 10.0, feature_goldens},
      {"end-to-end HTTP enroll, login, uniform failures, authorization", 10.0, end_to_end},
      {"probability strictly decreasing in n and each N_i", 10.0, monotonicity},
      {"persistence replay and truncated-tail recovery", 10.0, persistence},
  };

  int failed = 0;
  for (const auto& criterion : criteria) {
    Checker c;
    const auto start = Clock::now();
    try {
      criterion.body(c);
    } catch (const std::exception& e) {
      c.expect(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(Clock::now() - start).count();
    if (seconds > criterion.budget_seconds) {
      c.expect(false, "took " + std::to_string(seconds) + " s, budget " + std::to_string(criterion.budget_seconds));
    }
    std::printf("%s  %-72s %8.3f s  %zu checks%s%s\n", c.failed() ? "FAIL" : "PASS", criterion.name.c_str(), seconds,
                c.checks(), c.failed() ? "  " : "", c.summary().c_str());
    failed += c.failed() ? 1 : 0;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
