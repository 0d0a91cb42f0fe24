#pragma once

#include <cstdint>

#include "ttc/dense_tensor.hpp"
#include "ttc/tt_tensor.hpp"

namespace ttc {

class Rng;

/// Sequential SVD sweep over unfoldings. Each rank r_mu is the smaller of
/// max_ranks[mu] and the count of singular values above
/// rel_tol * sigma_max(unfolding), never below 1.
TTTensor tt_svd(const DenseTensor& t, const std::vector<Index>& max_ranks,
                double rel_tol);

/// Quasi-best TT approximation at the target rank chain: right-to-left
/// orthogonalization followed by a left-to-right truncated SVD sweep.
/// Positions where the target exceeds the current rank are left unchanged.
TTTensor tt_round(const TTTensor& x, const std::vector<Index>& target_ranks);

/// Entry x(i_1,...,i_d) as the product U_1(i_1)...U_d(i_d), O(d r^2).
double tt_entry(const TTTensor& x, const MultiIndex& idx);

/// <x, y> = sum over all multi-indices of x(i) y(i), by left-to-right core
/// contractions in O(d n r^3).
double inner_product(const TTTensor& x, const TTTensor& y);

/// sqrt(<x, x>).
double tt_norm(const TTTensor& x);

/// Mode-mu product z = x x_mu m, applied to the middle mode of core mu.
/// Ranks are unchanged; dim mu becomes m.rows().
TTTensor mode_multiply(const TTTensor& x, Index mu, const Matrix& m);

/// Reconstructs the dense tensor. Intended for small instances.
DenseTensor tt_to_dense(const TTTensor& x);

struct StorageBytes {
  std::uint64_t tt_bytes;
  std::uint64_t full_bytes;  // saturates at uint64 max for huge grids
};

/// Bytes to store the cores vs. the full tensor at 8 bytes per value.
StorageBytes storage_bytes(const TTTensor& x);

/// 8 * prod(dims) without overflow, for reporting beyond the uint64 range.
double storage_full_bytes_approx(const std::vector<Index>& dims);

/// TT tensor with cores filled i.i.d. uniform(-1, 1).
TTTensor tt_random(const std::vector<Index>& dims, const std::vector<Index>& ranks,
                   Rng& rng);

/// Rank-one TT with the given per-mode factor vectors.
TTTensor tt_rank_one(const std::vector<Vector>& factors);

}  // namespace ttc
