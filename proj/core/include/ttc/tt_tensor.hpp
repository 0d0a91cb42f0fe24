#pragma once

#include <vector>

#include "ttc/dense_tensor.hpp"

namespace ttc {

/// Tensor in tensor-train form: a chain of order-3 cores, core mu of shape
/// r_{mu-1} x n_mu x r_mu with boundary ranks r_0 = r_d = 1. Core buffers are
/// stored first-index-fastest, so the same buffer maps onto both standard
/// core unfoldings without copying:
///   left  unfolding: (r_{mu-1} n_mu) x r_mu
///   right unfolding: r_{mu-1} x (n_mu r_mu)
class TTTensor {
 public:
  TTTensor() = default;

  /// Zero tensor with the given dims (length d) and rank chain (length d+1).
  TTTensor(std::vector<Index> dims, std::vector<Index> ranks);

  static TTTensor from_cores(std::vector<Index> dims, std::vector<Index> ranks,
                             std::vector<std::vector<double>> cores);

  Index order() const { return static_cast<Index>(dims_.size()); }
  const std::vector<Index>& dims() const { return dims_; }
  const std::vector<Index>& ranks() const { return ranks_; }
  Index dim(Index mu) const { return dims_[static_cast<std::size_t>(mu - 1)]; }
  Index rank(Index mu) const { return ranks_[static_cast<std::size_t>(mu)]; }
  Index max_rank() const;

  /// Number of stored core entries.
  Index value_count() const;

  /// Core buffer for 1-based mu.
  std::vector<double>& core(Index mu) { return cores_[static_cast<std::size_t>(mu - 1)]; }
  const std::vector<double>& core(Index mu) const {
    return cores_[static_cast<std::size_t>(mu - 1)];
  }

  Eigen::Map<const Matrix> core_left(Index mu) const;
  Eigen::Map<Matrix> core_left(Index mu);
  Eigen::Map<const Matrix> core_right(Index mu) const;
  Eigen::Map<Matrix> core_right(Index mu);

  /// Slice U_mu(i): the r_{mu-1} x r_mu matrix for 1-based node index i.
  Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> core_slice(Index mu, Index i) const;

  /// Replace core mu, adjusting the adjacent rank entries. The caller is
  /// responsible for keeping the overall chain consistent; consistency is
  /// re-validated on each call.
  void set_core(Index mu, Index r_left, Index n, Index r_right, std::vector<double> data);

 private:
  void validate() const;

  std::vector<Index> dims_;
  std::vector<Index> ranks_;
  std::vector<std::vector<double>> cores_;
};

}  // namespace ttc
