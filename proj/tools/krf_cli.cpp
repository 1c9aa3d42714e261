#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "krf/config.hpp"
#include "krf/error.hpp"
#include "krf/report.hpp"

int main(int argc, char** argv) {
  CLI::App app{"U(n)-invariant Kaehler metrics and their radial Ricci flow"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<std::uint64_t> seed;

  for (const auto& name : krf::commands()) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "config file (section.key = value)")->required();
    sub->add_option("--out", out_dir, "output directory, overrides output.dir");
    sub->add_option("--seed", seed, "RNG seed, overrides run.seed");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  krf::RunConfig cfg;
  try {
    cfg = krf::load_config(config_path);
  } catch (const std::exception& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 2;
  }
  if (out_dir) cfg.output_dir = *out_dir;
  if (seed) cfg.seed = *seed;

  return krf::run_command(command, cfg, std::cout, std::cerr);
}
