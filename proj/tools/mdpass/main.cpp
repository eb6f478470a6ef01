#include <iostream>

#include "commands.hpp"

int main(int argc, char** argv) {
  using namespace mdpass::cli;

  CLI::App app{"mdpass: multi-dimensional password toolkit"};
  app.fallthrough();
  app.require_subcommand(1, 1);

  GlobalOptions global;
  app.add_option_function<std::string>(
         "--output",
         [&global](const std::string& mode) {
           global.output = mode == "json" ? OutputMode::kJson : mode == "csv" ? OutputMode::kCsv : OutputMode::kHuman;
         },
         "Output format")
      ->check(CLI::IsMember({"human", "json", "csv"}))
      ->default_str("human");
  app.add_option("--data", global.data, "Record log path (serve)")->envname("MDPASS_DATA");
  app.add_option("--bind", global.bind, "host:port to serve on or connect to")
      ->envname("MDPASS_BIND")
      ->capture_default_str();

  int exit_code = kOk;
  register_hash_image(app, global, exit_code);
  register_prob(app, global, exit_code);
  register_table(app, global, exit_code);
  register_simulate(app, global, exit_code);
  register_serve(app, global, exit_code);
  register_enroll(app, global, exit_code);
  register_login(app, global, exit_code);
  register_grant(app, global, exit_code);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }
  return exit_code;
}
