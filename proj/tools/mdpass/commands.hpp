#pragma once

#include <CLI11.hpp>

#include "args.hpp"

namespace mdpass::cli {

/// Each register_* call adds one subcommand whose callback stores its exit
/// code into `exit_code`.
void register_hash_image(CLI::App& app, const GlobalOptions& global, int& exit_code);
void register_prob(CLI::App& app, const GlobalOptions& global, int& exit_code);
void register_table(CLI::App& app, const GlobalOptions& global, int& exit_code);
void register_simulate(CLI::App& app, const GlobalOptions& global, int& exit_code);
void register_serve(CLI::App& app, const GlobalOptions& global, int& exit_code);
void register_enroll(CLI::App& app, const GlobalOptions& global, int& exit_code);
void register_login(CLI::App& app, const GlobalOptions& global, int& exit_code);
void register_grant(CLI::App& app, const GlobalOptions& global, int& exit_code);

}  // namespace mdpass::cli
