#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mdpass/probability.hpp"

namespace mdpass::sim {

/// kOptionsOnly: one option per dimension, success 1/prod(N_i).
/// kPaperModel: additionally picks one of n cyclic rotations of the
/// dimension sequence; success needs rotation 0 and every option right, so
/// the per-guess chance is 1/(n * prod(N_i)).
enum class AttackerModel { kOptionsOnly, kPaperModel };

std::string_view to_string(AttackerModel model);
/// "paper" or "options-only"; throws Error(kInvalidQuery) otherwise.
AttackerModel parse_attacker_model(std::string_view name);

/// A single attacker guess after unranking.
struct Guess {
  std::uint64_t rotation = 0;  // always 0 under kOptionsOnly
  std::vector<std::uint64_t> options;

  friend bool operator==(const Guess&, const Guess&) = default;
};

/// Mixed-radix view of the attacker's guess space. Index 0 ... size()-1 maps
/// bijectively onto guesses; the rotation digit (kPaperModel only) is the most
/// significant.
class GuessSpace {
 public:
  /// Throws Error(kSpaceTooLarge) if the space does not fit in 64 bits.
  GuessSpace(const prob::ProbabilityQuery& query, AttackerModel model);

  std::uint64_t size() const noexcept { return size_; }
  AttackerModel model() const noexcept { return model_; }
  Guess unrank(std::uint64_t index) const;
  std::uint64_t rank(const Guess& guess) const;

  /// Closed-form success probability for a single uniform guess.
  double model_probability() const noexcept { return 1.0 / static_cast<double>(size_); }

 private:
  AttackerModel model_;
  std::vector<std::uint64_t> options_;
  std::uint64_t size_ = 1;
};

struct EnumerationResult {
  std::uint64_t total = 0;
  std::uint64_t successes = 0;
};

inline constexpr std::uint64_t kEnumerationLimit = 10'000'000;

/// Walks every guess and counts those matching `secret` (rotation 0 with the
/// given option indices; all zeros when empty). Throws Error(kSpaceTooLarge)
/// above kEnumerationLimit.
EnumerationResult enumerate_space(const prob::ProbabilityQuery& query, AttackerModel model,
                                  std::span<const std::uint64_t> secret = {});

struct SimulationConfig {
  prob::ProbabilityQuery query;
  AttackerModel model = AttackerModel::kPaperModel;
  std::uint64_t trials = 1;
  std::uint64_t seed = 0;
  unsigned workers = 0;  // 0 = hardware concurrency; never affects the result
};

struct SimulationReport {
  std::uint64_t successes = 0;
  std::uint64_t trials = 0;
  double empirical = 0.0;
  double model_probability = 0.0;
  double three_sigma = 0.0;
  bool within_bound = false;

  friend bool operator==(const SimulationReport&, const SimulationReport&) = default;
};

/// Trials per independent random stream. Streams are keyed by (seed, chunk
/// index), so any worker count produces the same totals.
inline constexpr std::uint64_t kTrialsPerChunk = 1 << 16;

/// Deterministic stream used by `simulate`: std::mt19937_64 seeded with the
/// SplitMix64 mix of (seed, stream).
class TrialStream {
 public:
  TrialStream(std::uint64_t seed, std::uint64_t stream);

  std::uint64_t next() { return engine_(); }
  /// Unbiased draw from [0, bound) (Lemire multiply-shift with rejection).
  std::uint64_t below(std::uint64_t bound);

 private:
  std::mt19937_64 engine_;
};

/// Runs `trials` uniform guesses against a secret drawn from the seed.
/// Throws Error(kInvalidQuery) if trials == 0.
SimulationReport simulate(const SimulationConfig& config);

std::string report_json(const SimulationReport& report);

struct SweepEntry {
  SimulationConfig config;
  prob::Rational closed_form;                 // per-guess success chance
  std::optional<SimulationReport> report;
  std::optional<std::string> error;
};

/// Runs each config; failures are recorded per entry rather than thrown.
/// Throws Error(kInvalidQuery) on an empty list.
std::vector<SweepEntry> sweep(std::span<const SimulationConfig> configs);

enum class SweepAxis { kInputs, kOptions };

/// Probability-model CSV plus an `empirical` column; failed entries leave
/// the empirical cell empty. The closed-form columns follow the chosen
/// attacker model.
std::string sweep_csv(std::span<const SweepEntry> entries, SweepAxis axis);

}  // namespace mdpass::sim
