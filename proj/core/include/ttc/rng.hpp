#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace ttc {

/// Deterministic random stream. Raw bits come from std::mt19937_64, whose
/// output sequence is fixed by the standard; all conversions to doubles and
/// bounded integers are done explicitly here so results are identical across
/// platforms and standard-library implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  std::uint64_t next() { return eng_(); }

  /// Uniform integer in [0, n), rejection sampled to avoid modulo bias.
  std::uint64_t below(std::uint64_t n);

  /// Uniform double in the open interval (0, 1).
  double uniform01();

  double uniform(double a, double b) { return a + (b - a) * uniform01(); }

  /// Standard normal variate via the inverse CDF.
  double normal();

 private:
  std::mt19937_64 eng_;
};

/// Stable seed fan-out: one root seed plus a stream label gives an
/// independent child seed.
std::uint64_t derive_seed(std::uint64_t root, std::string_view label);

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF (Wichura's PPND16), p in (0, 1).
double inverse_normal_cdf(double p);

}  // namespace ttc
