#include "mdpass/attack.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

#include <nlohmann/json.hpp>

#include "mdpass/error.hpp"

namespace mdpass::sim {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t kSecretStream = std::numeric_limits<std::uint64_t>::max();

std::uint64_t run_chunk(const GuessSpace& space, const Guess& secret, std::uint64_t seed,
                        std::uint64_t chunk, std::uint64_t trials) {
  TrialStream stream(seed, chunk);
  std::uint64_t hits = 0;
  for (std::uint64_t t = 0; t < trials; ++t) {
    if (space.unrank(stream.below(space.size())) == secret) ++hits;
  }
  return hits;
}

}  // namespace

std::string_view to_string(AttackerModel model) {
  return model == AttackerModel::kPaperModel ? "paper" : "options-only";
}

AttackerModel parse_attacker_model(std::string_view name) {
  if (name == "paper") return AttackerModel::kPaperModel;
  if (name == "options-only") return AttackerModel::kOptionsOnly;
  throw Error(ErrorCode::kInvalidQuery, "unknown attacker model '" + std::string(name) + "'");
}

GuessSpace::GuessSpace(const prob::ProbabilityQuery& query, AttackerModel model)
    : model_(model), options_(query.options().begin(), query.options().end()) {
  constexpr auto kMax = std::numeric_limits<std::uint64_t>::max();
  auto multiply = [this](std::uint64_t factor) {
    if (size_ > kMax / factor) throw Error(ErrorCode::kSpaceTooLarge, "guess space exceeds 2^64");
    size_ *= factor;
  };
  if (model_ == AttackerModel::kPaperModel) multiply(options_.size());
  for (std::uint64_t n : options_) multiply(n);
}

Guess GuessSpace::unrank(std::uint64_t index) const {
  Guess g;
  g.options.resize(options_.size());
  for (std::size_t i = options_.size(); i-- > 0;) {
    g.options[i] = index % options_[i];
    index /= options_[i];
  }
  if (model_ == AttackerModel::kPaperModel) g.rotation = index;
  return g;
}

std::uint64_t GuessSpace::rank(const Guess& guess) const {
  std::uint64_t index = model_ == AttackerModel::kPaperModel ? guess.rotation : 0;
  for (std::size_t i = 0; i < options_.size(); ++i) index = index * options_[i] + guess.options[i];
  return index;
}

EnumerationResult enumerate_space(const prob::ProbabilityQuery& query, AttackerModel model,
                                  std::span<const std::uint64_t> secret) {
  const GuessSpace space(query, model);
  if (space.size() > kEnumerationLimit) {
    throw Error(ErrorCode::kSpaceTooLarge, "space of " + std::to_string(space.size()) +
                                               " guesses exceeds the enumeration guard");
  }
  Guess target;
  target.options.assign(query.inputs(), 0);
  if (!secret.empty()) {
    if (secret.size() != query.inputs()) throw Error(ErrorCode::kInvalidQuery, "secret length mismatch");
    target.options.assign(secret.begin(), secret.end());
  }

  EnumerationResult result;
  for (std::uint64_t i = 0; i < space.size(); ++i) {
    const Guess g = space.unrank(i);
    ++result.total;
    // The rotation digit only exists under kPaperModel; a rotated
    // submission never matches the enrolled sequence.
    if (g.rotation == 0 && g.options == target.options) ++result.successes;
  }
  return result;
}

TrialStream::TrialStream(std::uint64_t seed, std::uint64_t stream)
    : engine_(splitmix64(seed ^ splitmix64(stream))) {}

std::uint64_t TrialStream::below(std::uint64_t bound) {
  __extension__ using u128 = unsigned __int128;
  u128 m = static_cast<u128>(next()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = static_cast<u128>(next()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

SimulationReport simulate(const SimulationConfig& config) {
  if (config.trials == 0) throw Error(ErrorCode::kInvalidQuery, "trials must be >= 1");
  const GuessSpace space(config.query, config.model);

  Guess secret;
  {
    TrialStream s(config.seed, kSecretStream);
    for (std::uint64_t n : config.query.options()) secret.options.push_back(s.below(n));
  }

  const std::uint64_t chunks = (config.trials + kTrialsPerChunk - 1) / kTrialsPerChunk;
  auto chunk_trials = [&](std::uint64_t c) {
    return std::min(kTrialsPerChunk, config.trials - c * kTrialsPerChunk);
  };

  unsigned workers = config.workers ? config.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, chunks));

  std::vector<std::uint64_t> hits(chunks, 0);
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) {
      hits[c] = run_chunk(space, secret, config.seed, c, chunk_trials(c));
    }
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t c = w; c < chunks; c += workers) {
          hits[c] = run_chunk(space, secret, config.seed, c, chunk_trials(c));
        }
      });
    }
  }

  SimulationReport r;
  r.trials = config.trials;
  for (std::uint64_t h : hits) r.successes += h;
  r.empirical = static_cast<double>(r.successes) / static_cast<double>(r.trials);
  r.model_probability = space.model_probability();
  const double p = r.model_probability;
  r.three_sigma = 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(r.trials));
  r.within_bound = std::abs(r.empirical - p) <= r.three_sigma;
  return r;
}

std::string report_json(const SimulationReport& r) {
  const nlohmann::json j = {{"successes", r.successes},
                            {"trials", r.trials},
                            {"empirical", r.empirical},
                            {"model_probability", r.model_probability},
                            {"three_sigma", r.three_sigma},
                            {"within_bound", r.within_bound}};
  return j.dump();
}

std::vector<SweepEntry> sweep(std::span<const SimulationConfig> configs) {
  if (configs.empty()) throw Error(ErrorCode::kInvalidQuery, "sweep needs at least one config");
  std::vector<SweepEntry> entries;
  for (const auto& config : configs) {
    SweepEntry entry{config, prob::Rational(0), std::nullopt, std::nullopt};
    try {
      prob::BigInt denominator = 1;
      for (std::uint64_t n : config.query.options()) denominator *= n;
      if (config.model == AttackerModel::kPaperModel) denominator *= config.query.inputs();
      entry.closed_form = prob::Rational(prob::BigInt(1), denominator);
      entry.report = simulate(config);
    } catch (const Error& e) {
      entry.error = e.what();
    }
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::string sweep_csv(std::span<const SweepEntry> entries, SweepAxis axis) {
  if (entries.empty()) throw Error(ErrorCode::kInvalidQuery, "no rows to emit");
  std::string out = "param,probability,log10_probability,empirical\n";
  for (const auto& e : entries) {
    const auto& q = e.config.query;
    const std::uint64_t param = axis == SweepAxis::kInputs ? q.inputs() : q.options().front();
    const prob::BigInt denominator = boost::multiprecision::denominator(e.closed_form);
    out += std::to_string(param) + ",";
    if (denominator > 0 && boost::multiprecision::numerator(e.closed_form) == 1) {
      char log10[32];
      std::snprintf(log10, sizeof log10, "%.6f", prob::log10_reciprocal(denominator));
      out += prob::format_reciprocal(denominator) + "," + log10;
    } else {
      out += ",";
    }
    out += ",";
    if (e.report) {
      char emp[32];
      std::snprintf(emp, sizeof emp, "%.6E", e.report->empirical);
      out += emp;
    }
    out += "\n";
  }
  return out;
}

}  // namespace mdpass::sim
