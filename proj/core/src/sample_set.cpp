#include "ttc/sample_set.hpp"

#include <unordered_set>

namespace ttc {

void SampleSet::append(const SampleSet& other) {
  indices.insert(indices.end(), other.indices.begin(), other.indices.end());
  values.insert(values.end(), other.values.begin(), other.values.end());
}

bool has_unique_indices(const SampleSet& s, const std::vector<Index>& dims) {
  std::unordered_set<Index> seen;
  seen.reserve(s.indices.size());
  for (const auto& idx : s.indices) {
    if (!seen.insert(linear_offset(dims, idx)).second) return false;
  }
  return true;
}

bool disjoint(const SampleSet& a, const SampleSet& b, const std::vector<Index>& dims) {
  std::unordered_set<Index> seen;
  seen.reserve(a.indices.size());
  for (const auto& idx : a.indices) seen.insert(linear_offset(dims, idx));
  for (const auto& idx : b.indices) {
    if (seen.count(linear_offset(dims, idx))) return false;
  }
  return true;
}

}  // namespace ttc
