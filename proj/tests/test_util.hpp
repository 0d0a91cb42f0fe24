#pragma once

#include <cmath>
#include <vector>

#include "ttc/dense_tensor.hpp"
#include "ttc/rng.hpp"
#include "ttc/tt_ops.hpp"
#include "ttc/tt_tensor.hpp"

// Brute-force reference routines for the TT machinery. Everything here works
// entry by entry through plain loops, independent of the library's
// contraction paths.
namespace ttc::testutil {

inline DenseTensor random_dense(const std::vector<Index>& dims, Rng& rng) {
  DenseTensor t = DenseTensor::zeros(dims);
  for (auto& v : t.values) v = rng.uniform(-1.0, 1.0);
  return t;
}

inline std::vector<MultiIndex> all_indices(const std::vector<Index>& dims) {
  std::vector<MultiIndex> out;
  const Index total = product(dims);
  out.reserve(static_cast<std::size_t>(total));
  for (Index lin = 0; lin < total; ++lin) out.push_back(multi_index_at(dims, lin));
  return out;
}

inline double dense_inner_product(const DenseTensor& a, const DenseTensor& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) s += a.values[i] * b.values[i];
  return s;
}

inline double max_abs_diff(const DenseTensor& a, const DenseTensor& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    m = std::max(m, std::abs(a.values[i] - b.values[i]));
  }
  return m;
}

inline double relative_diff_2norm(const DenseTensor& a, const DenseTensor& b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double d = a.values[i] - b.values[i];
    num += d * d;
    den += a.values[i] * a.values[i];
  }
  return std::sqrt(num) / std::sqrt(den);
}

/// Mode-mu product computed by the literal sum over the mu-th index.
inline DenseTensor dense_mode_multiply(const DenseTensor& x, Index mu, const Matrix& m) {
  std::vector<Index> dims = x.dims;
  dims[static_cast<std::size_t>(mu - 1)] = m.rows();
  DenseTensor z = DenseTensor::zeros(dims);
  for (const auto& idx : all_indices(dims)) {
    double s = 0.0;
    MultiIndex src = idx;
    for (Index i = 1; i <= x.dims[static_cast<std::size_t>(mu - 1)]; ++i) {
      src[static_cast<std::size_t>(mu - 1)] = i;
      s += x.at(src) * m(idx[static_cast<std::size_t>(mu - 1)] - 1, i - 1);
    }
    z.at(idx) = s;
  }
  return z;
}

/// Rank-one dense tensor from factor vectors (outer product).
inline DenseTensor dense_rank_one(const std::vector<Vector>& factors) {
  std::vector<Index> dims;
  for (const auto& f : factors) dims.push_back(f.size());
  DenseTensor t = DenseTensor::zeros(dims);
  for (const auto& idx : all_indices(dims)) {
    double v = 1.0;
    for (std::size_t i = 0; i < factors.size(); ++i) {
      v *= factors[i](idx[i] - 1);
    }
    t.at(idx) = v;
  }
  return t;
}

inline std::vector<Vector> random_factors(const std::vector<Index>& dims, Rng& rng) {
  std::vector<Vector> fs;
  for (Index n : dims) {
    Vector f(n);
    for (Index i = 0; i < n; ++i) f(i) = rng.uniform(-1.0, 1.0);
    fs.push_back(f);
  }
  return fs;
}

/// Dense tensor sampled entrywise from a TT tensor via tt_entry.
inline DenseTensor dense_from_tt_entries(const TTTensor& x) {
  DenseTensor t = DenseTensor::zeros(x.dims());
  for (const auto& idx : all_indices(x.dims())) t.at(idx) = tt_entry(x, idx);
  return t;
}

}  // namespace ttc::testutil
