#include "ttc/tt_tensor.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace ttc {

TTTensor::TTTensor(std::vector<Index> dims, std::vector<Index> ranks)
    : dims_(std::move(dims)), ranks_(std::move(ranks)) {
  cores_.resize(dims_.size());
  for (std::size_t mu = 0; mu < dims_.size(); ++mu) {
    cores_[mu].assign(
        static_cast<std::size_t>(ranks_[mu] * dims_[mu] * ranks_[mu + 1]), 0.0);
  }
  validate();
}

TTTensor TTTensor::from_cores(std::vector<Index> dims, std::vector<Index> ranks,
                              std::vector<std::vector<double>> cores) {
  TTTensor t;
  t.dims_ = std::move(dims);
  t.ranks_ = std::move(ranks);
  t.cores_ = std::move(cores);
  t.validate();
  return t;
}

void TTTensor::validate() const {
  const std::size_t d = dims_.size();
  if (d == 0) throw std::domain_error("TT tensor order must be >= 1");
  if (ranks_.size() != d + 1) {
    throw std::domain_error("rank chain length must be order + 1");
  }
  if (ranks_.front() != 1 || ranks_.back() != 1) {
    throw std::domain_error("boundary TT ranks must equal 1");
  }
  if (cores_.size() != d) throw std::domain_error("core count must equal order");
  for (std::size_t mu = 0; mu < d; ++mu) {
    if (dims_[mu] < 1) throw std::domain_error("TT dims must be >= 1");
    if (ranks_[mu] < 1 || ranks_[mu + 1] < 1) {
      throw std::domain_error("TT ranks must be >= 1");
    }
    const auto expected =
        static_cast<std::size_t>(ranks_[mu] * dims_[mu] * ranks_[mu + 1]);
    if (cores_[mu].size() != expected) {
      throw std::domain_error("core " + std::to_string(mu + 1) +
                              " size does not match its rank/dim shape");
    }
  }
}

Index TTTensor::max_rank() const {
  return *std::max_element(ranks_.begin(), ranks_.end());
}

Index TTTensor::value_count() const {
  Index n = 0;
  for (const auto& c : cores_) n += static_cast<Index>(c.size());
  return n;
}

Eigen::Map<const Matrix> TTTensor::core_left(Index mu) const {
  const auto m = static_cast<std::size_t>(mu - 1);
  return {cores_[m].data(), ranks_[m] * dims_[m], ranks_[m + 1]};
}

Eigen::Map<Matrix> TTTensor::core_left(Index mu) {
  const auto m = static_cast<std::size_t>(mu - 1);
  return {cores_[m].data(), ranks_[m] * dims_[m], ranks_[m + 1]};
}

Eigen::Map<const Matrix> TTTensor::core_right(Index mu) const {
  const auto m = static_cast<std::size_t>(mu - 1);
  return {cores_[m].data(), ranks_[m], dims_[m] * ranks_[m + 1]};
}

Eigen::Map<Matrix> TTTensor::core_right(Index mu) {
  const auto m = static_cast<std::size_t>(mu - 1);
  return {cores_[m].data(), ranks_[m], dims_[m] * ranks_[m + 1]};
}

Eigen::Map<const Matrix, 0, Eigen::OuterStride<>> TTTensor::core_slice(Index mu,
                                                                       Index i) const {
  const auto m = static_cast<std::size_t>(mu - 1);
  if (i < 1 || i > dims_[m]) {
    throw std::domain_error("core slice index out of bounds");
  }
  const Index r0 = ranks_[m], n = dims_[m], r1 = ranks_[m + 1];
  return {cores_[m].data() + r0 * (i - 1), r0, r1, Eigen::OuterStride<>(r0 * n)};
}

void TTTensor::set_core(Index mu, Index r_left, Index n, Index r_right,
                        std::vector<double> data) {
  const auto m = static_cast<std::size_t>(mu - 1);
  if (m >= dims_.size()) throw std::domain_error("core index out of bounds");
  dims_[m] = n;
  ranks_[m] = r_left;
  ranks_[m + 1] = r_right;
  cores_[m] = std::move(data);
  validate();
}

}  // namespace ttc
