#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ttc/dense_tensor.hpp"
#include "ttc/rng.hpp"
#include "ttc/sample_set.hpp"
#include "ttc/tt_tensor.hpp"

namespace ttc {

struct CompletionConfig {
  double delta = 1e-4;        // inner-solver stagnation threshold
  double rho = 0.0;           // rank-increase acceptance margin, >= 0
  double tol = 1e-3;          // outer stop 1: error below tolerance
  double tol_prime = 1e-8;    // outer stop 2: error stagnation
  Index r_max = 10;           // outer stop 3: rank cap
  double max_sampling_fraction = 0.1;  // p, share of the grid Omega may reach
  Index initial_train_size = 1;        // |Omega| in the first round
  Index test_set_size = 100;           // |Omega_C|
  Index gamma_size = 0;                // |Gamma|, strategy 2 only
  int strategy = 1;                    // 1: varying test set, 2: fixed Gamma
  Index max_inner_iterations = 250;
  std::uint64_t rng_seed = 0;

  void validate(Index d) const;
};

enum class StopReason {
  tolerance_met,
  error_stagnated,
  rank_cap_hit,
  sampling_budget_exhausted,
};

std::string to_string(StopReason reason);

struct CompletionResult {
  TTTensor tensor;
  SampleSet final_training_set;
  std::vector<std::pair<Index, double>> error_history;  // (|Omega|, rel. error)
  std::vector<std::vector<Index>> rank_history;
  StopReason stop_reason = StopReason::sampling_budget_exhausted;
  std::vector<std::string> warnings;
};

/// Entry-wise view of the underlying tensor, evaluated on demand. Must be
/// deterministic: repeated queries at the same index return the same value.
class EntryOracle {
 public:
  virtual ~EntryOracle() = default;
  virtual double at(const MultiIndex& idx) const = 0;
  /// Batch evaluation; the default loops over at(). Implementations may
  /// evaluate concurrently as long as results land in input order.
  virtual std::vector<double> batch(const std::vector<MultiIndex>& indices) const;
};

class FunctionOracle final : public EntryOracle {
 public:
  explicit FunctionOracle(std::function<double(const MultiIndex&)> fn)
      : fn_(std::move(fn)) {}
  double at(const MultiIndex& idx) const override { return fn_(idx); }

 private:
  std::function<double(const MultiIndex&)> fn_;
};

/// Oracle evaluation failure with the offending index attached.
struct OracleError : std::runtime_error {
  OracleError(const std::string& what, MultiIndex idx)
      : std::runtime_error(what), index(std::move(idx)) {}
  MultiIndex index;
};

/// Raised when the reference values on a sample set are all zero, making a
/// relative error undefined.
struct ZeroReferenceError : std::domain_error {
  using std::domain_error::domain_error;
};

/// || restriction of (A - x) to s || / || restriction of A to s ||, 2-norm
/// over the listed entries.
double relative_error_on_set(const TTTensor& x, const SampleSet& s);

struct FixedRankSolveResult {
  TTTensor tensor;
  double eps_train = 0.0;
  double eps_test = 0.0;
  Index iterations = 0;
  bool underdetermined = false;  // |Omega| below the TT dof at these ranks
};

/// Randomized data-aware rank-(1,...,1) starting guess: per-mode slice means
/// of the training values (sign-coherent within each mode) with small noise,
/// scaled to the sample RMS. Sign-disordered purely random starts leave the
/// sparse least-squares objective in spurious basins; this one does not.
TTTensor initial_rank_one_guess(const std::vector<Index>& dims,
                                const SampleSet& train, Rng& rng);

/// Fixed-rank completion: alternating least-squares sweeps over the cores,
/// minimizing the training residual at the ranks of `start`, stopped when
/// the relative changes of both the training and the test error fall below
/// cfg.delta, or after cfg.max_inner_iterations sweeps. The training error
/// of the returned tensor never exceeds that of `start`.
FixedRankSolveResult solve_fixed_rank(const SampleSet& train, const SampleSet& test,
                                      const TTTensor& start,
                                      const CompletionConfig& cfg);

/// Returns a tensor with rank r_mu incremented by one. Both cores adjacent
/// to the bond receive a new slice of zero-mean uniform noise scaled to
/// 1e-4 * ||x|| / sqrt(core size), so the reconstruction is essentially
/// unchanged but the new direction is visible to the solver.
TTTensor increase_rank(const TTTensor& x, Index mu, Rng& rng);

struct AdaptiveRankResult {
  TTTensor tensor;
  double eps_test = 0.0;
  bool underdetermined = false;
};

/// Rank adaptivity: cyclic sweep over the interior bond positions, keeping a
/// rank increase only when it improves the test error by more than -rho,
/// until d-1 consecutive positions are locked or a rank reaches cfg.r_max.
AdaptiveRankResult adaptive_rank(const SampleSet& train, const SampleSet& test,
                                 const CompletionConfig& cfg, const TTTensor& start,
                                 Rng& rng);

/// Sampling adaptivity: grow the training set by folding in each test set
/// and drawing a fresh disjoint one, rerunning the rank-adaptive completion
/// warm-started from the rank-(1,...,1) rounding of the previous result,
/// until one of the three stopping criteria fires or the sampling budget p
/// is exhausted. Strategy 2 measures the error on a fixed reference set
/// Gamma drawn up front instead of on the varying test sets.
CompletionResult adaptive_sampling(const EntryOracle& oracle,
                                   const std::vector<Index>& dims,
                                   const CompletionConfig& cfg);

/// JSON report with error/rank histories, stop reason, final |Omega| and
/// storage sizes of the result.
std::string completion_report_json(const CompletionResult& result);

}  // namespace ttc
