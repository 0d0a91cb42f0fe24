#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "ttc/chebyshev.hpp"
#include "ttc/completion.hpp"
#include "ttc/pricing.hpp"

namespace ttc::cli {

struct OracleSpec {
  enum class Kind { basket, exp_norm, external };
  Kind kind = Kind::exp_norm;
  BasketModel model;                      // basket only
  Index number_sim = 1000;                // basket only
  std::optional<std::uint64_t> mc_seed;   // basket; derived from root when absent
  std::string command;                    // external only
};

/// One JSON document describing a full offline run: grid, oracle, completion
/// parameters, seed and output paths.
struct RunConfig {
  ChebyshevGrid grid;
  OracleSpec oracle;
  CompletionConfig completion;
  bool completion_seed_explicit = false;
  std::uint64_t seed = 0;
  std::string out_interpolant = "interpolant.ttc";
  std::string report_path;  // empty: out_interpolant + ".report.json"
  std::optional<std::string> gbm_cache;

  std::string resolved_report_path() const {
    return report_path.empty() ? out_interpolant + ".report.json" : report_path;
  }
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

}  // namespace ttc::cli
