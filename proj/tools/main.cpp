#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"
#include "run_config.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Tensor-train Chebyshev surrogates for parametric pricing"};
  app.require_subcommand(1);

  std::string config_path, out_override;
  std::uint64_t seed_override = 0;
  bool has_seed = false;

  auto* offline = app.add_subcommand(
      "offline", "Build an interpolant: adaptive completion + coefficient transform");
  offline->add_option("--config", config_path, "Run configuration JSON")->required();
  offline->add_option("--seed", seed_override, "Override the root seed")
      ->each([&](const std::string&) { has_seed = true; });
  offline->add_option("--out", out_override, "Override the interpolant output path");

  std::string interp_path, batch_path, prices_out = "prices.csv";
  bool allow_extrapolation = false, timing = false;
  auto* price = app.add_subcommand("price", "Evaluate an interpolant on a batch");
  price->add_option("--interpolant", interp_path, "Interpolant file (TTC1 + sidecar)")
      ->required();
  price->add_option("--batch", batch_path, "CSV batch, one parameter point per row")
      ->required();
  price->add_option("--out", prices_out, "Output CSV of prices");
  price->add_flag("--allow-extrapolation", allow_extrapolation,
                  "Evaluate points outside the domain instead of rejecting them");
  price->add_flag("--timing", timing, "Report the median per-price time");

  std::string study_path, study_prefix;
  auto* rank = app.add_subcommand("rank-analysis",
                                  "Singular-value study of d=2 price surfaces");
  rank->add_option("--config", study_path, "Study configuration JSON")->required();
  rank->add_option("--out", study_prefix, "Output prefix for CSV/JSON files");

  std::string inspect_path;
  auto* inspect = app.add_subcommand("inspect", "Dump dims/ranks/storage of a TTC1 file");
  inspect->add_option("file", inspect_path, "TTC1 file")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (offline->parsed()) {
      ttc::cli::RunConfig cfg = ttc::cli::load_run_config(config_path);
      if (has_seed) cfg.seed = seed_override;
      if (!out_override.empty()) cfg.out_interpolant = out_override;
      return ttc::cli::cmd_offline(cfg);
    }
    if (price->parsed()) {
      return ttc::cli::cmd_price(interp_path, batch_path, prices_out,
                                 allow_extrapolation, timing);
    }
    if (rank->parsed()) {
      return ttc::cli::cmd_rank_analysis(study_path, study_prefix);
    }
    if (inspect->parsed()) {
      return ttc::cli::cmd_inspect(inspect_path);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
