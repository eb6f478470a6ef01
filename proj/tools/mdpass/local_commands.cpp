#include <cstdio>
#include <iostream>

#include <nlohmann/json.hpp>

#include "commands.hpp"
#include "mdpass/attack.hpp"
#include "mdpass/error.hpp"
#include "mdpass/pgm.hpp"
#include "mdpass/probability.hpp"

namespace mdpass::cli {
namespace {

// Domain errors in offline commands are caller mistakes: exit 2.
template <typename Fn>
void guarded(int& exit_code, Fn&& fn) {
  try {
    exit_code = fn();
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    exit_code = kUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << to_string(e.code()) << ": " << e.what() << "\n";
    exit_code = kUsage;
  }
}

}  // namespace

void register_hash_image(CLI::App& app, const GlobalOptions& global, int& exit_code) {
  auto* cmd = app.add_subcommand("hash-image", "Print the 64-bit block-average feature of a PGM image");
  auto path = std::make_shared<std::string>();
  cmd->add_option("path", *path, "P2/P5 graymap, maxval 255")->required();
  cmd->callback([&global, &exit_code, path] {
    guarded(exit_code, [&] {
      const std::string hex = extract_image_feature(read_pgm_file(*path)).to_hex();
      switch (global.output) {
        case OutputMode::kJson:
          std::cout << nlohmann::json{{"path", *path}, {"feature", hex}}.dump() << "\n";
          break;
        case OutputMode::kCsv:
          std::cout << "path,feature\n" << *path << "," << hex << "\n";
          break;
        case OutputMode::kHuman:
          std::cout << hex << "\n";
          break;
      }
      return kOk;
    });
  });
}

void register_prob(CLI::App& app, const GlobalOptions& global, int& exit_code) {
  auto* cmd = app.add_subcommand("prob", "Closed-form probability of guessing a credential");
  struct Args {
    std::uint64_t inputs = 0;
    std::string options;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--inputs,-n", args->inputs, "Number of inputs (dimensions)")->required();
  cmd->add_option("--options,-N", args->options, "Options per input: one count, or one per input (3,4,5)")
      ->required();
  cmd->callback([&global, &exit_code, args] {
    guarded(exit_code, [&] {
      if (args->inputs > prob::ProbabilityQuery::kMaxInputs) throw UsageError("--inputs is too large");
      const auto query = prob::ProbabilityQuery::broadcast(args->inputs, parse_count_list(args->options));
      const auto report = prob::hack_probability(query);
      switch (global.output) {
        case OutputMode::kJson:
          std::cout << prob::report_json(query, report) << "\n";
          break;
        case OutputMode::kCsv: {
          char lg[32];
          std::snprintf(lg, sizeof lg, "%.6f", report.log10_value);
          std::cout << "inputs,search_space,probability,log10_probability\n"
                    << query.inputs() << "," << report.search_space << "," << report.formatted << "," << lg
                    << "\n";
          break;
        }
        case OutputMode::kHuman:
          std::cout << "probability  " << report.formatted << "\n"
                    << "search space " << report.search_space << "\n";
          break;
      }
      return kOk;
    });
  });
}

void register_table(CLI::App& app, const GlobalOptions& global, int& exit_code) {
  auto* cmd = app.add_subcommand(
      "table",
      "Probability table over a parameter range.\n"
      "  --fix-options N --inputs a..b        vary the number of inputs\n"
      "  --fix-inputs n --options a..b:step   vary the options per input\n"
      "Ranges are inclusive: a..b, a..b:step, or a single value.");
  struct Args {
    std::optional<std::uint64_t> fix_options;
    std::optional<std::uint64_t> fix_inputs;
    std::string inputs;
    std::string options;
    std::string emit;
  };
  auto args = std::make_shared<Args>();
  auto* fix_options = cmd->add_option("--fix-options", args->fix_options, "Options per input (held fixed)");
  auto* fix_inputs = cmd->add_option("--fix-inputs", args->fix_inputs, "Number of inputs (held fixed)");
  auto* inputs = cmd->add_option("--inputs", args->inputs, "Range of input counts");
  auto* options = cmd->add_option("--options", args->options, "Range of option counts");
  cmd->add_option("--emit", args->emit, "Also write STEM.csv and STEM.json plot series");
  fix_options->excludes(fix_inputs)->needs(inputs)->excludes(options);
  fix_inputs->needs(options)->excludes(inputs);

  cmd->callback([&global, &exit_code, args] {
    guarded(exit_code, [&] {
      std::vector<prob::TableRow> rows;
      std::string param_name;
      if (args->fix_options) {
        rows = prob::table_vary_inputs(*args->fix_options, parse_range(args->inputs));
        param_name = "n";
      } else if (args->fix_inputs) {
        if (*args->fix_inputs > prob::ProbabilityQuery::kMaxInputs) throw UsageError("--fix-inputs is too large");
        rows = prob::table_vary_options(*args->fix_inputs, parse_range(args->options));
        param_name = "N";
      } else {
        throw UsageError("table needs --fix-options with --inputs, or --fix-inputs with --options");
      }
      if (!args->emit.empty()) prob::emit_plot_data(rows, args->emit);
      switch (global.output) {
        case OutputMode::kJson:
          std::cout << prob::plot_json(rows) << "\n";
          break;
        case OutputMode::kCsv:
          std::cout << prob::plot_csv(rows);
          break;
        case OutputMode::kHuman:
          std::cout << param_name << "\tprobability\n";
          for (const auto& row : rows) std::cout << row.param << "\t" << row.report.formatted << "\n";
          break;
      }
      return kOk;
    });
  });
}

void register_simulate(CLI::App& app, const GlobalOptions& global, int& exit_code) {
  auto* cmd = app.add_subcommand("simulate", "Monte-Carlo brute-force attack against the option space");
  struct Args {
    std::uint64_t inputs = 0;
    std::string options;
    std::string model = "paper";
    std::uint64_t trials = 1000000;
    std::uint64_t seed = 1;
    unsigned workers = 0;
    std::string sweep_inputs;
    std::string sweep_options;
  };
  auto args = std::make_shared<Args>();
  cmd->add_option("--inputs,-n", args->inputs, "Number of inputs")->required();
  cmd->add_option("--options,-N", args->options, "Options per input: one count, or one per input")->required();
  cmd->add_option("--model", args->model, "paper | options-only")
      ->check(CLI::IsMember({"paper", "options-only"}))
      ->capture_default_str();
  cmd->add_option("--trials", args->trials, "Number of guesses")->capture_default_str();
  cmd->add_option("--seed", args->seed, "Generator seed")->capture_default_str();
  cmd->add_option("--workers", args->workers, "Worker threads (0 = all cores); never changes results");
  auto* si = cmd->add_option("--sweep-inputs", args->sweep_inputs,
                             "Run one simulation per input count in RANGE; prints CSV");
  cmd->add_option("--sweep-options", args->sweep_options,
                  "Run one simulation per option count in RANGE; prints CSV")
      ->excludes(si);

  cmd->callback([&global, &exit_code, args] {
    guarded(exit_code, [&] {
      if (args->inputs > prob::ProbabilityQuery::kMaxInputs) throw UsageError("--inputs is too large");
      const auto model = sim::parse_attacker_model(args->model);
      const auto options = parse_count_list(args->options);

      if (!args->sweep_inputs.empty() || !args->sweep_options.empty()) {
        if (options.size() != 1) throw UsageError("sweeps need a single --options count");
        std::vector<sim::SimulationConfig> configs;
        const bool by_inputs = !args->sweep_inputs.empty();
        for (std::uint64_t v : parse_range(by_inputs ? args->sweep_inputs : args->sweep_options)) {
          if (by_inputs && v > prob::ProbabilityQuery::kMaxInputs) throw UsageError("sweep input count too large");
          auto query = by_inputs ? prob::ProbabilityQuery::uniform(v, options[0])
                                 : prob::ProbabilityQuery::uniform(args->inputs, v);
          configs.push_back({std::move(query), model, args->trials, args->seed, args->workers});
        }
        const auto entries = sim::sweep(configs);
        std::cout << sim::sweep_csv(entries, by_inputs ? sim::SweepAxis::kInputs : sim::SweepAxis::kOptions);
        bool all_within = true;
        for (const auto& e : entries) {
          if (e.error) std::cerr << "error: " << *e.error << "\n";
          all_within = all_within && e.report && e.report->within_bound;
        }
        return all_within ? kOk : kNegative;
      }

      const sim::SimulationConfig config{prob::ProbabilityQuery::broadcast(args->inputs, options), model,
                                         args->trials, args->seed, args->workers};
      const auto report = sim::simulate(config);
      if (global.output == OutputMode::kHuman) {
        char line[256];
        std::snprintf(line, sizeof line,
                      "successes    %llu / %llu\nempirical    %.6E\nmodel        %.6E\n3 sigma      %.6E\n"
                      "within bound %s\n",
                      static_cast<unsigned long long>(report.successes),
                      static_cast<unsigned long long>(report.trials), report.empirical,
                      report.model_probability, report.three_sigma, report.within_bound ? "yes" : "no");
        std::cout << line;
      } else if (global.output == OutputMode::kCsv) {
        char row[256];
        std::snprintf(row, sizeof row, "%llu,%llu,%.6E,%.6E,%.6E,%d\n",
                      static_cast<unsigned long long>(report.successes),
                      static_cast<unsigned long long>(report.trials), report.empirical,
                      report.model_probability, report.three_sigma, report.within_bound ? 1 : 0);
        std::cout << "successes,trials,empirical,model_probability,three_sigma,within_bound\n" << row;
      } else {
        std::cout << sim::report_json(report) << "\n";
      }
      return report.within_bound ? kOk : kNegative;
    });
  });
}

}  // namespace mdpass::cli
