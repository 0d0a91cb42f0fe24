#pragma once

#include <vector>

#include "ttc/dense_tensor.hpp"

namespace ttc {

enum class SampleRole { training, test, fixed_reference };

/// Set of grid multi-indices with evaluated values. Indices are expected to
/// be unique within a set; training/test/reference sets used together must
/// be pairwise disjoint.
struct SampleSet {
  SampleRole role = SampleRole::training;
  std::vector<MultiIndex> indices;
  std::vector<double> values;

  Index size() const { return static_cast<Index>(indices.size()); }
  bool empty() const { return indices.empty(); }

  void append(const SampleSet& other);
};

bool has_unique_indices(const SampleSet& s, const std::vector<Index>& dims);
bool disjoint(const SampleSet& a, const SampleSet& b, const std::vector<Index>& dims);

}  // namespace ttc
