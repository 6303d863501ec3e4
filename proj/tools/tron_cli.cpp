// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <iostream>

#include "tron/cli/commands.hpp"
#include "tron/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"tron: temporal branch/trunk operator networks for sparse-sensor field reconstruction"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t seed = 0;
  std::string out;
  std::vector<std::string> overrides;
  const char* names[] = {"generate", "prepare", "train", "evaluate", "infer", "bench"};
  for (const char* name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "flat key = value config file");
    sub->add_option("--seed", seed, "overrides scenario.seed and train.seed");
    sub->add_option("--out", out, "output directory (paths.out)");
    sub->add_option("--set", overrides, "extra key=value override, repeatable");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    tron::cli::RunConfig config = config_path.empty() ? tron::cli::RunConfig::parse("")
                                                      : tron::cli::RunConfig::load(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw tron::ConfigError("--set expects key=value, got '" + kv + "'");
      config.set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    const std::string command = app.get_subcommands().front()->get_name();
    const auto* sub = app.get_subcommand(command);
    if (sub->count("--seed")) {
      config.scenario.seed = seed;
      config.train.seed = seed;
    }
    if (sub->count("--out")) config.paths.out = out;
    config.finalize();
    tron::cli::run_command(command, config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return tron::cli::exit_code_for(e);
  }
  return 0;
}
