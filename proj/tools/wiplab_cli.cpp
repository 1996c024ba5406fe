#include <CLI11.hpp>
#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "wiplab/experiments.hpp"

int main(int argc, char** argv) {
  CLI::App app{"wiplab: weak invariance principle laboratory"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  int threads = 1;

  CLI::App* run = app.add_subcommand("run", "run an experiment from a config");
  run->add_option("--config", config_path, "TOML config file")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "override the master seed");
  run->add_option("--out", out_dir, "override the output directory");
  run->add_option("--threads", threads, "worker threads")
      ->check(CLI::PositiveNumber);

  CLI::App* list = app.add_subcommand("list", "list available experiments");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (list->parsed()) {
    std::cout << wiplab::experiment_catalog();
    return 0;
  }
  return wiplab::run_experiment_file(config_path, seed, out_dir, threads);
}
