#pragma once

#include <string>

#include "run_config.hpp"
#include "ttc/chebyshev.hpp"
#include "ttc/completion.hpp"

namespace ttc::cli {

struct OfflineOutcome {
  CompletionResult completion;
  Interpolant interpolant;
  std::string report_json;
  int exit_code = 0;
};

/// Offline phase: sample the oracle over the grid with adaptive completion,
/// transform values to Chebyshev coefficients, write the interpolant file and
/// a JSON report. Exit code 0 on a criteria stop, 2 when the sampling budget
/// ran out before any stopping criterion fired (artifacts are still written).
OfflineOutcome run_offline(const RunConfig& cfg);
int cmd_offline(const RunConfig& cfg);

/// Online phase: one price per input row, written as one price per output
/// line. Out-of-domain rows are rejected individually (NaN is emitted and the
/// row number reported on stderr) unless extrapolation is allowed.
int cmd_price(const std::string& interpolant_path, const std::string& batch_path,
              const std::string& out_path, bool allow_extrapolation,
              bool report_timing);

/// Singular-value study of two-asset price surfaces: the single-path payoff
/// study over a list of alpha pairs, or the Monte Carlo basket study over
/// domains and interpolation orders. Writes a singular-values CSV and a rank
/// summary JSON next to the given prefix.
int cmd_rank_analysis(const std::string& config_path, const std::string& out_prefix);

/// Dump dims, ranks and storage sizes of a TTC1 file as JSON on stdout.
int cmd_inspect(const std::string& path);

}  // namespace ttc::cli
