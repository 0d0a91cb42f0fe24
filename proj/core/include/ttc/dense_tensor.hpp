#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

namespace ttc {

using Index = std::int64_t;
using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Multi-index into a tensor. Components are 1-based: idx[i] in [1, n_i].
using MultiIndex = std::vector<Index>;

Index product(const std::vector<Index>& dims);

/// 0-based linear offset of a 1-based multi-index, first index fastest.
Index linear_offset(const std::vector<Index>& dims, const MultiIndex& idx);

/// Inverse of linear_offset.
MultiIndex multi_index_at(const std::vector<Index>& dims, Index offset);

/// Throws std::domain_error if idx does not address a tensor of shape dims.
void check_multi_index(const std::vector<Index>& dims, const MultiIndex& idx);

/// Dense tensor of order d >= 1. Entries are stored first-index-fastest,
/// so the flat buffer is directly usable as a column-major matrix for any
/// split of the index set into a leading and trailing group.
struct DenseTensor {
  std::vector<Index> dims;
  std::vector<double> values;

  DenseTensor() = default;
  DenseTensor(std::vector<Index> dims_in, std::vector<double> values_in);

  static DenseTensor zeros(std::vector<Index> dims_in);

  Index order() const { return static_cast<Index>(dims.size()); }
  Index size() const { return static_cast<Index>(values.size()); }

  double at(const MultiIndex& idx) const {
    return values[static_cast<std::size_t>(linear_offset(dims, idx))];
  }
  double& at(const MultiIndex& idx) {
    return values[static_cast<std::size_t>(linear_offset(dims, idx))];
  }

  double norm2() const;
};

/// mu-th unfolding of t, 1 <= mu <= d-1: rows merge the first mu indices,
/// columns the remaining d-mu, both first-index-fastest. Reshaping back
/// recovers t exactly.
Matrix unfold(const DenseTensor& t, Index mu);

}  // namespace ttc
