#include <exception>
#include <iostream>

#include "CLI11.hpp"
#include "cli_common.hpp"

int main(int argc, char** argv) {
  using namespace snowtrend::cli;
  CLI::App app{"snowtrend: gridded snowfall-climate analysis"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  GlobalOptions global;
  app.add_option("--config", global.config_path,
                 "JSON config file with one section per command");
  app.add_option("--set", global.set_overrides,
                 "Config override as dotted.path=value (repeatable)");
  app.add_option("--seed", global.seed, "Root RNG seed");
  app.add_option("--threads", global.threads, "Worker threads")
      ->check(CLI::PositiveNumber);

  register_synth(app, global);
  register_wetbulb(app, global);
  register_fuse(app, global);
  register_snowmask(app, global);
  register_spr(app, global);
  register_trend(app, global);
  register_validate(app, global);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
