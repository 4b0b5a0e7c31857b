#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "fairdrift/cli.hpp"

namespace cli = fairdrift::cli;

int main(int argc, char** argv) {
  CLI::App app{"Temporal fairness experiments with anticipatory reweighing"};
  app.set_version_flag("--version", std::string(cli::tool_version()));
  app.require_subcommand(1);

  cli::CommandOptions options;
  std::string out_dir;
  std::string alphas;
  std::uint64_t seed = 0;

  auto* run = app.add_subcommand("run", "Run the configured regimes and write per-step metrics");
  auto* sweep = app.add_subcommand("sweep", "Sweep the blend factor alpha for the abc regime");
  for (auto* sub : {run, sweep}) {
    sub->add_option("--config", options.config, "Experiment config (JSON)")->required();
    sub->add_option("--out", out_dir, "Output directory (overrides output.dir)");
    sub->add_option("--seed", seed, "Seed override for data generation and training");
  }
  sweep->add_option("--alphas", alphas, "Comma-separated alpha values (default 0.0,0.1,...,1.0)");

  std::string spec_path;
  auto* gen = app.add_subcommand("gen", "Generate a synthetic drifting stream as CSV");
  gen->add_option("--config", spec_path, "Drift spec (JSON)")->required();
  gen->add_option("--out", out_dir, "Output CSV path")->required();
  gen->add_option("--seed", seed, "Seed override");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : cli::kExitConfig;
  }

  auto seed_given = [&](CLI::App* sub) {
    return sub->count("--seed") > 0 ? std::optional<std::uint64_t>(seed) : std::nullopt;
  };

  if (*gen) return cli::cmd_gen(spec_path, out_dir, seed_given(gen), std::cout, std::cerr);

  auto* active = *run ? run : sweep;
  if (!out_dir.empty()) options.out_dir = out_dir;
  options.seed = seed_given(active);
  if (*sweep && !alphas.empty()) {
    try {
      options.alphas = cli::parse_alpha_list(alphas);
    } catch (const std::exception& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return cli::kExitConfig;
    }
  }
  return *run ? cli::cmd_run(options, std::cout, std::cerr)
              : cli::cmd_sweep(options, std::cout, std::cerr);
}
