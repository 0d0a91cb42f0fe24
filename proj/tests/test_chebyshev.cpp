#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "test_util.hpp"
#include "ttc/chebyshev.hpp"
#include "ttc/rng.hpp"
#include "ttc/tt_ops.hpp"

using namespace ttc;
using namespace ttc::testutil;

namespace {

ChebyshevGrid uniform_grid(Index d, Index n, double lo, double hi) {
  ChebyshevGrid g;
  g.orders.assign(static_cast<std::size_t>(d), n);
  g.domain.intervals.assign(static_cast<std::size_t>(d), {lo, hi});
  return g;
}

/// Dense tensor of f sampled on the grid nodes.
template <typename F>
DenseTensor sample_on_grid(const ChebyshevGrid& grid, F f) {
  DenseTensor t = DenseTensor::zeros(grid.shape());
  for (const auto& idx : all_indices(grid.shape())) t.at(idx) = f(grid_point(grid, idx));
  return t;
}

TTTensor full_tt(const DenseTensor& t) {
  std::vector<Index> ranks(t.dims.size() + 1, 1000);
  ranks.front() = ranks.back() = 1;
  return tt_svd(t, ranks, 0.0);
}

}  // namespace

TEST_SUITE("chebyshev") {

TEST_CASE("grid points at the corner, midpoint and a quoted node") {
  auto g = uniform_grid(3, 4, -1.0, 1.0);
  CHECK(grid_point(g, {1, 1, 1}) == std::vector<double>{1.0, 1.0, 1.0});

  // even order: middle node k = n/2 maps to the domain midpoint
  auto g2 = uniform_grid(1, 4, 2.0, 6.0);
  CHECK(grid_point(g2, {3})[0] == doctest::Approx(4.0).epsilon(1e-15));

  auto g3 = uniform_grid(1, 4, 1.0, 1.5);
  CHECK(grid_point(g3, {2})[0] == doctest::Approx(1.4267766953).epsilon(1e-9));
}

TEST_CASE("grid point bounds are checked") {
  auto g = uniform_grid(2, 3, 0.0, 1.0);
  CHECK_THROWS_AS(grid_point(g, {5, 1}), std::domain_error);
  CHECK_THROWS_AS(grid_point(g, {1}), std::domain_error);
}

TEST_CASE("coefficient matrix for n = 1 and the degenerate n = 0") {
  Matrix f = build_coeff_matrix(1);
  CHECK(f(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f(1, 0) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(f(1, 1) == doctest::Approx(-0.5).epsilon(1e-15));

  Matrix f0 = build_coeff_matrix(0);
  CHECK(f0.rows() == 1);
  CHECK(f0(0, 0) == 1.0);
}

TEST_CASE("coefficient matrix maps constants to a single coefficient") {
  const Index n = 6;
  Matrix f = build_coeff_matrix(n);
  Vector v = Vector::Constant(n + 1, 3.25);
  Vector c = f * v;
  CHECK(c(0) == doctest::Approx(3.25).epsilon(1e-14));
  for (Index j = 1; j <= n; ++j) CHECK(std::abs(c(j)) <= 1e-14);
}

TEST_CASE("coefficient matrix recovers x = T_1") {
  Matrix f = build_coeff_matrix(1);
  Vector v(2);
  v << 1.0, -1.0;  // values of x at nodes (1, -1)
  Vector c = f * v;
  CHECK(std::abs(c(0)) <= 1e-15);
  CHECK(c(1) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("coefficients of a constant concentrate at the first entry") {
  auto g = uniform_grid(3, 3, 0.0, 2.0);
  const double c = -1.75;
  TTTensor values = full_tt(sample_on_grid(g, [&](const std::vector<double>&) { return c; }));
  Interpolant interp = coeffs_from_values(values, g);
  for (const auto& idx : all_indices(g.shape())) {
    const double expected =
        (idx == MultiIndex{1, 1, 1}) ? c : 0.0;
    CHECK(std::abs(tt_entry(interp.coeffs, idx) - expected) <= 1e-13);
  }
}

TEST_CASE("coefficients of a product of Chebyshev polynomials are a unit spike") {
  auto g = uniform_grid(2, 3, -1.0, 1.0);
  auto f = [](const std::vector<double>& p) {
    const double t2 = 2.0 * p[0] * p[0] - 1.0;  // T_2
    return t2 * p[1];                            // T_2(p1) T_1(p2)
  };
  Interpolant interp = coeffs_from_values(full_tt(sample_on_grid(g, f)), g);
  for (const auto& idx : all_indices(g.shape())) {
    const double expected = (idx == MultiIndex{3, 2}) ? 1.0 : 0.0;
    CHECK(std::abs(tt_entry(interp.coeffs, idx) - expected) <= 1e-13);
  }
}

TEST_CASE("fft and dense transform paths agree entrywise") {
  Rng rng(71);
  for (Index n : {1, 2, 3, 5, 10, 31, 64}) {
    auto g = uniform_grid(3, n, 0.0, 1.0);
    TTTensor p = tt_random(g.shape(), {1, 3, 2, 1}, rng);
    Interpolant via_fft = coeffs_from_values(p, g, TransformPath::fft);
    Interpolant via_dense = coeffs_from_values(p, g, TransformPath::dense);
    for (Index mu = 1; mu <= 3; ++mu) {
      const auto& a = via_fft.coeffs.core(mu);
      const auto& b = via_dense.coeffs.core(mu);
      REQUIRE(a.size() == b.size());
      for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a[i] - b[i]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("transform preserves the rank chain") {
  Rng rng(73);
  auto g = uniform_grid(4, 5, 0.0, 1.0);
  TTTensor p = tt_random(g.shape(), {1, 3, 4, 2, 1}, rng);
  Interpolant interp = coeffs_from_values(p, g);
  CHECK(interp.coeffs.ranks() == p.ranks());
}

TEST_CASE("transform is linear in the values") {
  Rng rng(79);
  auto g = uniform_grid(2, 6, -1.0, 2.0);
  DenseTensor a = random_dense(g.shape(), rng);
  DenseTensor b = random_dense(g.shape(), rng);
  const double alpha = 1.75, beta = -0.4;
  DenseTensor mix = a;
  for (std::size_t i = 0; i < mix.values.size(); ++i) {
    mix.values[i] = alpha * a.values[i] + beta * b.values[i];
  }
  TTTensor ca = coeffs_from_values(full_tt(a), g).coeffs;
  TTTensor cb = coeffs_from_values(full_tt(b), g).coeffs;
  TTTensor cmix = coeffs_from_values(full_tt(mix), g).coeffs;
  for (const auto& idx : all_indices(g.shape())) {
    const double expected = alpha * tt_entry(ca, idx) + beta * tt_entry(cb, idx);
    CHECK(std::abs(tt_entry(cmix, idx) - expected) <= 1e-12);
  }
}

TEST_CASE("basis factors at the domain corner are all ones") {
  auto g = uniform_grid(3, 4, 0.0, 2.0);
  TTTensor basis = basis_rank_one(g, {2.0, 2.0, 2.0});
  for (const auto& idx : all_indices(g.shape())) {
    CHECK(tt_entry(basis, idx) == doctest::Approx(1.0).epsilon(1e-13));
  }
}

TEST_CASE("basis factors at the domain center follow the cosine pattern") {
  auto g = uniform_grid(1, 6, -1.0, 1.0);
  TTTensor basis = basis_rank_one(g, {0.0});
  const double expected[] = {1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0};
  for (Index j = 0; j <= 6; ++j) {
    CHECK(tt_entry(basis, {j + 1}) == doctest::Approx(expected[j]).epsilon(1e-14));
  }
}

TEST_CASE("basis recurrence matches the arccos form") {
  Rng rng(83);
  auto g = uniform_grid(2, 9, -1.0, 1.0);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> p = {rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)};
    TTTensor basis = basis_rank_one(g, p);
    for (Index mu = 1; mu <= 2; ++mu) {
      for (Index j = 0; j <= 9; ++j) {
        MultiIndex idx = {1, 1};
        idx[static_cast<std::size_t>(mu - 1)] = j + 1;
        const double direct =
            std::cos(static_cast<double>(j) *
                     std::acos(p[static_cast<std::size_t>(mu - 1)]));
        CHECK(std::abs(tt_entry(basis, idx) -
                       direct * 1.0) <= 1e-13);
      }
    }
  }
}

TEST_CASE("out-of-domain points are rejected unless extrapolation is allowed") {
  auto g = uniform_grid(2, 3, 0.0, 1.0);
  CHECK_THROWS_AS(basis_rank_one(g, {0.5, 1.2}), ExtrapolationError);
  CHECK_NOTHROW(basis_rank_one(g, {0.5, 1.2}, true));
}

TEST_CASE("interpolant of a constant reproduces it anywhere") {
  auto g = uniform_grid(3, 5, 1.0, 1.5);
  const double c = 0.321;
  Interpolant interp = coeffs_from_values(
      full_tt(sample_on_grid(g, [&](const std::vector<double>&) { return c; })), g);
  Rng rng(89);
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<double> p = {rng.uniform(1.0, 1.5), rng.uniform(1.0, 1.5),
                             rng.uniform(1.0, 1.5)};
    CHECK(evaluate(interp, p) == doctest::Approx(c).epsilon(1e-13));
  }
}

TEST_CASE("polynomials below the order are interpolated exactly") {
  auto g = uniform_grid(3, 4, 0.5, 2.0);
  auto f = [](const std::vector<double>& p) {
    return p[0] * p[0] * p[1] * p[1] * p[2] * p[2];
  };
  Interpolant interp = coeffs_from_values(full_tt(sample_on_grid(g, f)), g);
  Rng rng(97);
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> p = {rng.uniform(0.5, 2.0), rng.uniform(0.5, 2.0),
                             rng.uniform(0.5, 2.0)};
    CHECK(evaluate(interp, p) == doctest::Approx(f(p)).epsilon(1e-11));
  }
}

TEST_CASE("interpolant reproduces the node values") {
  Rng rng(101);
  auto g = uniform_grid(3, 4, 1.0, 1.5);
  DenseTensor values = random_dense(g.shape(), rng);
  Interpolant interp = coeffs_from_values(full_tt(values), g);
  for (const auto& idx : all_indices(g.shape())) {
    const double v = evaluate(interp, grid_point(g, idx));
    CHECK(std::abs(v - values.at(idx)) <= 1e-10 * std::abs(values.at(idx)) + 1e-12);
  }
}

TEST_CASE("TT evaluation agrees with the literal dense oracle") {
  Rng rng(103);
  for (int rep = 0; rep < 10; ++rep) {
    const Index d = 1 + static_cast<Index>(rng.below(3));
    const Index n = 1 + static_cast<Index>(rng.below(5));
    auto g = uniform_grid(d, n, -0.5, 1.5);
    DenseTensor values = random_dense(g.shape(), rng);
    Interpolant interp = coeffs_from_values(full_tt(values), g);
    std::vector<double> p;
    for (Index i = 0; i < d; ++i) p.push_back(rng.uniform(-0.5, 1.5));
    const double via_tt = evaluate(interp, p);
    const double via_dense = evaluate_dense_oracle(values, g, p);
    CHECK(std::abs(via_tt - via_dense) <= 1e-11);
  }
}

TEST_CASE("dense oracle of a constant is the constant") {
  auto g = uniform_grid(2, 3, 0.0, 1.0);
  DenseTensor values = sample_on_grid(g, [](const std::vector<double>&) { return 7.5; });
  CHECK(evaluate_dense_oracle(values, g, {0.3, 0.7}) ==
        doctest::Approx(7.5).epsilon(1e-13));
}

TEST_CASE("one-dimensional dense oracle equals the matrix transform route") {
  Rng rng(107);
  const Index n = 8;
  auto g = uniform_grid(1, n, -2.0, 0.5);
  DenseTensor values = random_dense(g.shape(), rng);
  Matrix f = build_coeff_matrix(n);
  Vector c = f * Eigen::Map<const Vector>(values.values.data(), n + 1);
  for (int rep = 0; rep < 10; ++rep) {
    const double p = rng.uniform(-2.0, 0.5);
    const double x = 2.0 * (p + 2.0) / 2.5 - 1.0;
    double direct = 0.0;
    for (Index j = 0; j <= n; ++j) {
      direct += c(j) * std::cos(static_cast<double>(j) * std::acos(x));
    }
    CHECK(std::abs(evaluate_dense_oracle(values, g, {p}) - direct) <= 1e-13);
  }
}

TEST_CASE("dense oracle refuses oversized grids") {
  ChebyshevGrid g;
  g.orders = {127, 127, 127};
  g.domain.intervals.assign(3, {0.0, 1.0});
  DenseTensor values = DenseTensor::zeros(g.shape());
  CHECK_THROWS_AS(evaluate_dense_oracle(values, g, {0.5, 0.5, 0.5}), std::domain_error);
}

TEST_CASE("order-zero dimensions are treated as constant") {
  ChebyshevGrid g;
  g.orders = {3, 0};
  g.domain.intervals = {{0.0, 1.0}, {2.0, 3.0}};
  auto f = [](const std::vector<double>& p) { return p[0] * p[0]; };
  Interpolant interp = coeffs_from_values(full_tt(sample_on_grid(g, f)), g);
  CHECK(evaluate(interp, {0.25, 2.8}) == doctest::Approx(0.0625).epsilon(1e-12));
}

TEST_CASE("interpolant round trips through its file format") {
  Rng rng(109);
  auto g = uniform_grid(3, 4, 1.0, 1.5);
  TTTensor p = tt_random(g.shape(), {1, 2, 2, 1}, rng);
  Interpolant interp = coeffs_from_values(p, g);

  const auto path = std::filesystem::temp_directory_path() / "ttc_test_interp.ttc";
  write_interpolant(path.string(), interp);
  Interpolant loaded = read_interpolant(path.string());

  CHECK(loaded.grid.orders == interp.grid.orders);
  CHECK(loaded.grid.domain.intervals == interp.grid.domain.intervals);
  for (Index mu = 1; mu <= 3; ++mu) {
    CHECK(loaded.coeffs.core(mu) == interp.coeffs.core(mu));
  }
  std::filesystem::remove(path);
  std::filesystem::remove(path.string() + ".json");
}

}  // TEST_SUITE
