#pragma once

#include <array>
#include <stdexcept>
#include <string>
#include <vector>

#include "ttc/dense_tensor.hpp"
#include "ttc/tt_tensor.hpp"

namespace ttc {

/// Raised when a parameter point lies outside the interpolation domain and
/// extrapolation was not explicitly allowed.
struct ExtrapolationError : std::domain_error {
  using std::domain_error::domain_error;
};

/// Compact hyper-rectangular parameter domain.
struct Domain {
  std::vector<std::array<double, 2>> intervals;  // {lower, upper}, lower < upper

  Index dim() const { return static_cast<Index>(intervals.size()); }
  double lower(Index i) const { return intervals[static_cast<std::size_t>(i - 1)][0]; }
  double upper(Index i) const { return intervals[static_cast<std::size_t>(i - 1)][1]; }
  void validate() const;
};

/// Per-dimension interpolation orders over a domain. The grid tensor has
/// shape (n_1+1) x ... x (n_d+1); reference nodes are q_k = cos(pi k / n_i),
/// so q_0 = 1 and q_{n_i} = -1. Order 0 means constant in that dimension.
struct ChebyshevGrid {
  std::vector<Index> orders;
  Domain domain;

  Index dim() const { return static_cast<Index>(orders.size()); }
  std::vector<Index> shape() const;
  double reference_node(Index dim_i, Index k) const;  // dim_i 1-based, k 0-based
  void validate() const;
};

/// Chebyshev node tuple for a 1-based grid multi-index (component i selects
/// node k_i = idx_i - 1), affinely mapped into the domain.
std::vector<double> grid_point(const ChebyshevGrid& grid, const MultiIndex& idx);

/// The (n+1) x (n+1) matrix mapping node values to Chebyshev coefficients:
/// F(j+1, k+1) = (2/n) w_j w_k cos(j pi k / n), with w_0 = w_n = 1/2 and
/// w_m = 1 otherwise. F_0 = [1].
Matrix build_coeff_matrix(Index n);

enum class TransformPath { fft, dense };

/// Coefficient tensor bound to its grid; the deployable surrogate.
struct Interpolant {
  TTTensor coeffs;
  ChebyshevGrid grid;
};

/// C = P x_1 F_{n_1} x_2 ... x_d F_{n_d} applied core by core. The fft path
/// realizes each F_n through a type-I DCT; the dense path multiplies by the
/// explicit matrix. Ranks of C equal ranks of P.
Interpolant coeffs_from_values(const TTTensor& values, const ChebyshevGrid& grid,
                               TransformPath path = TransformPath::fft);

/// Rank-(1,...,1) tensor whose mu-th factor holds T_0..T_{n_mu} evaluated at
/// the affine pullback of p, via the three-term recurrence.
TTTensor basis_rank_one(const ChebyshevGrid& grid, const std::vector<double>& p,
                        bool allow_extrapolation = false);

/// Interpolated value <C, T_p>.
double evaluate(const Interpolant& interp, const std::vector<double>& p,
                bool allow_extrapolation = false);

/// Literal nested-sum interpolation from the dense value tensor: the full
/// primed coefficient sums followed by the full basis sum. Test oracle for
/// the TT path; refused beyond 1e6 grid entries.
double evaluate_dense_oracle(const DenseTensor& values, const ChebyshevGrid& grid,
                             const std::vector<double>& p);

/// Interpolant file: TTC1 binary plus a JSON sidecar carrying the orders and
/// domain intervals.
void write_interpolant(const std::string& path, const Interpolant& interp);
Interpolant read_interpolant(const std::string& path);

}  // namespace ttc
