#include "ttc/dense_tensor.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ttc {

Index product(const std::vector<Index>& dims) {
  Index p = 1;
  for (Index n : dims) p *= n;
  return p;
}

Index linear_offset(const std::vector<Index>& dims, const MultiIndex& idx) {
  check_multi_index(dims, idx);
  Index off = 0;
  Index stride = 1;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    off += (idx[i] - 1) * stride;
    stride *= dims[i];
  }
  return off;
}

MultiIndex multi_index_at(const std::vector<Index>& dims, Index offset) {
  MultiIndex idx(dims.size());
  for (std::size_t i = 0; i < dims.size(); ++i) {
    idx[i] = offset % dims[i] + 1;
    offset /= dims[i];
  }
  return idx;
}

void check_multi_index(const std::vector<Index>& dims, const MultiIndex& idx) {
  if (idx.size() != dims.size()) {
    throw std::domain_error("multi-index order " + std::to_string(idx.size()) +
                            " does not match tensor order " +
                            std::to_string(dims.size()));
  }
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (idx[i] < 1 || idx[i] > dims[i]) {
      throw std::domain_error("multi-index component " + std::to_string(i + 1) +
                              " = " + std::to_string(idx[i]) +
                              " outside [1, " + std::to_string(dims[i]) + "]");
    }
  }
}

DenseTensor::DenseTensor(std::vector<Index> dims_in, std::vector<double> values_in)
    : dims(std::move(dims_in)), values(std::move(values_in)) {
  if (dims.empty()) throw std::domain_error("tensor order must be >= 1");
  for (Index n : dims) {
    if (n < 1) throw std::domain_error("tensor dimensions must be >= 1");
  }
  if (static_cast<Index>(values.size()) != product(dims)) {
    throw std::domain_error("value count does not match product of dims");
  }
}

DenseTensor DenseTensor::zeros(std::vector<Index> dims_in) {
  Index n = product(dims_in);
  if (dims_in.empty() || n < 1) throw std::domain_error("invalid dims");
  return DenseTensor(std::move(dims_in), std::vector<double>(static_cast<std::size_t>(n), 0.0));
}

double DenseTensor::norm2() const {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

Matrix unfold(const DenseTensor& t, Index mu) {
  const Index d = t.order();
  if (mu < 1 || mu > d - 1) {
    throw std::domain_error("unfolding index mu = " + std::to_string(mu) +
                            " outside [1, " + std::to_string(d - 1) + "]");
  }
  Index rows = 1, cols = 1;
  for (Index i = 0; i < mu; ++i) rows *= t.dims[static_cast<std::size_t>(i)];
  for (Index i = mu; i < d; ++i) cols *= t.dims[static_cast<std::size_t>(i)];
  return Eigen::Map<const Matrix>(t.values.data(), rows, cols);
}

}  // namespace ttc
