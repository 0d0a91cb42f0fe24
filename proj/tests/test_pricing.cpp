#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>

#include "ttc/pricing.hpp"
#include "ttc/rng.hpp"

using namespace ttc;

namespace {

BasketModel table4_model(Index d) {
  BasketModel m;
  m.d = d;
  m.rate = 0.0;
  m.sigmas.assign(static_cast<std::size_t>(d), 0.2);
  m.correlation = Matrix::Identity(d, d);
  m.weights.assign(static_cast<std::size_t>(d), 1.0 / static_cast<double>(d));
  m.strike = 1.0;
  m.maturity = 0.25;
  return m;
}

// Undiscounted Black-Scholes call E[(S_T - K)^+], written out independently.
double bs_expected_call(double s0, double k, double r, double sigma, double t) {
  const double sd = sigma * std::sqrt(t);
  const double d1 = (std::log(s0 / k) + (r + 0.5 * sigma * sigma) * t) / sd;
  const double d2 = d1 - sd;
  return s0 * std::exp(r * t) * normal_cdf(d1) - k * normal_cdf(d2);
}

}  // namespace

TEST_SUITE("pricing") {

TEST_CASE("cholesky of the identity is the identity") {
  Matrix l = cholesky_factor(Matrix::Identity(4, 4));
  CHECK((l - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("cholesky of a 2x2 correlation matches the closed form") {
  const double rho = 0.63;
  Matrix c(2, 2);
  c << 1.0, rho, rho, 1.0;
  Matrix l = cholesky_factor(c);
  CHECK(l(0, 0) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(l(1, 0) == doctest::Approx(rho).epsilon(1e-15));
  CHECK(l(1, 1) == doctest::Approx(std::sqrt(1.0 - rho * rho)).epsilon(1e-14));
  CHECK(l(0, 1) == 0.0);
  CHECK(((l * l.transpose()) - c).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("cholesky names the failing pivot on an indefinite matrix") {
  Matrix c(2, 2);
  c << 1.0, 1.0000001, 1.0000001, 1.0;
  try {
    cholesky_factor(c);
    FAIL("expected a decomposition error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("pivot 2") != std::string::npos);
  }
}

TEST_CASE("zero volatility gives the deterministic drift factor") {
  BasketModel m = table4_model(3);
  m.rate = 0.07;
  m.sigmas.assign(3, 0.0);
  GbmSampleMatrix g = simulate_gbm_matrix(m, 50, 1234);
  const double expected = std::exp(m.rate * m.maturity);
  for (Index i = 0; i < g.number_sim(); ++i) {
    for (Index j = 0; j < 3; ++j) CHECK(g.values(i, j) == expected);
  }
}

TEST_CASE("column means reflect the martingale property") {
  BasketModel m = table4_model(4);
  m.rate = 0.03;
  const Index n = 100000;
  GbmSampleMatrix g = simulate_gbm_matrix(m, n, 42);
  const double target = std::exp(m.rate * m.maturity);
  for (Index j = 0; j < 4; ++j) {
    const double mean = g.values.col(j).mean();
    const double sd = std::sqrt(
        (g.values.col(j).array() - mean).square().sum() / static_cast<double>(n - 1));
    const double se = sd / std::sqrt(static_cast<double>(n));
    CHECK(std::abs(mean - target) <= 4.0 * se);
  }
}

TEST_CASE("identity correlation gives uncorrelated log factors") {
  BasketModel m = table4_model(3);
  const Index n = 100000;
  GbmSampleMatrix g = simulate_gbm_matrix(m, n, 7);
  Matrix logs = g.values.array().log().matrix();
  for (Index a = 0; a < 3; ++a) {
    for (Index b = a + 1; b < 3; ++b) {
      Vector xa = logs.col(a).array() - logs.col(a).mean();
      Vector xb = logs.col(b).array() - logs.col(b).mean();
      const double corr = xa.dot(xb) / (xa.norm() * xb.norm());
      CHECK(std::abs(corr) <= 4.0 / std::sqrt(static_cast<double>(n)));
    }
  }
}

TEST_CASE("sample matrices are reproducible per seed") {
  BasketModel m = table4_model(3);
  GbmSampleMatrix a = simulate_gbm_matrix(m, 500, 99);
  GbmSampleMatrix b = simulate_gbm_matrix(m, 500, 99);
  CHECK(a.values == b.values);
  GbmSampleMatrix c = simulate_gbm_matrix(m, 500, 100);
  CHECK(a.values != c.values);
}

TEST_CASE("geometric mean reduces to Black-Scholes for a single asset") {
  BasketModel m;
  m.d = 1;
  m.rate = 0.05;
  m.sigmas = {0.3};
  m.correlation = Matrix::Ones(1, 1);
  m.weights = {1.0};
  m.strike = 1.1;
  m.maturity = 0.75;
  const double via_cv = geometric_cv_mean(m, {1.04});
  const double via_bs = bs_expected_call(1.04, 1.1, 0.05, 0.3, 0.75);
  CHECK(via_cv == doctest::Approx(via_bs).epsilon(1e-13));
}

TEST_CASE("geometric mean in the zero-volatility limit") {
  BasketModel m = table4_model(2);
  m.rate = 0.04;
  m.sigmas.assign(2, 0.0);
  const std::vector<double> s0 = {1.2, 1.3};
  const double geo = std::sqrt(1.2 * 1.3) * std::exp(m.rate * m.maturity);
  CHECK(geometric_cv_mean(m, s0) ==
        doctest::Approx(std::max(geo - 1.0, 0.0)).epsilon(1e-14));
}

TEST_CASE("geometric mean matches a large Monte Carlo estimate") {
  BasketModel m = table4_model(4);
  m.rate = 0.02;
  m.correlation = make_random_correlation(4, 5);
  const std::vector<double> s0 = {1.1, 0.95, 1.25, 1.0};
  GbmSampleMatrix g = simulate_gbm_matrix(m, 1000000, 77);
  const auto [mc, se] = geometric_payoff_mc(m, g, s0);
  CHECK(std::abs(geometric_cv_mean(m, s0) - mc) <= 4.0 * se);
}

TEST_CASE("geometric mean rejects nonpositive prices") {
  BasketModel m = table4_model(2);
  CHECK_THROWS_AS(geometric_cv_mean(m, {1.0, 0.0}), std::domain_error);
  CHECK_THROWS_AS(geometric_cv_mean(m, {1.0, -2.0}), std::domain_error);
}

TEST_CASE("single-asset basket price collapses to the control variate mean") {
  BasketModel m;
  m.d = 1;
  m.rate = 0.03;
  m.sigmas = {0.25};
  m.correlation = Matrix::Ones(1, 1);
  m.weights = {1.0};
  m.strike = 1.0;
  m.maturity = 0.5;
  for (Index n : {1, 17, 1000}) {
    GbmSampleMatrix g = simulate_gbm_matrix(m, n, 3 + n);
    const double price = basket_price_cv(m, g, {1.07});
    const double exact = std::exp(-m.rate * m.maturity) * geometric_cv_mean(m, {1.07});
    CHECK(std::abs(price - exact) <= 1e-12);
  }
}

TEST_CASE("zero volatility makes the price exact") {
  BasketModel m = table4_model(3);
  m.rate = 0.05;
  m.sigmas.assign(3, 0.0);
  GbmSampleMatrix g = simulate_gbm_matrix(m, 10, 1);
  const std::vector<double> s0 = {1.3, 1.4, 1.2};
  double forward = 0.0;
  for (std::size_t i = 0; i < 3; ++i) forward += s0[i] / 3.0;
  REQUIRE(forward * std::exp(m.rate * m.maturity) > m.strike);
  const double expected = forward - m.strike * std::exp(-m.rate * m.maturity);
  CHECK(basket_price_cv(m, g, s0) == doctest::Approx(expected).epsilon(1e-14));
}

TEST_CASE("control-variate price agrees with an independent plain estimate") {
  BasketModel m = table4_model(5);
  const std::vector<double> s0(5, 1.25);
  GbmSampleMatrix g = simulate_gbm_matrix(m, 100000, 2024);
  const double cv = basket_price_cv(m, g, s0);

  GbmSampleMatrix fresh = simulate_gbm_matrix(m, 100000, 4048);
  const Index n = fresh.number_sim();
  double acc = 0.0, acc2 = 0.0;
  for (Index sim = 0; sim < n; ++sim) {
    double basket = 0.0;
    for (Index i = 0; i < 5; ++i) basket += 0.2 * s0[static_cast<std::size_t>(i)] * fresh.values(sim, i);
    const double pay = std::max(basket - 1.0, 0.0);
    acc += pay;
    acc2 += pay * pay;
  }
  const double plain = acc / static_cast<double>(n);
  const double se =
      std::sqrt((acc2 / static_cast<double>(n) - plain * plain) / static_cast<double>(n));
  CHECK(std::abs(cv - plain) <= 1.96 * se + 5e-4);
}

TEST_CASE("the control variate reduces the sample variance") {
  for (Index d : {5, 10}) {
    BasketModel m = table4_model(d);
    const std::vector<double> s0(static_cast<std::size_t>(d), 1.2);
    GbmSampleMatrix g = simulate_gbm_matrix(m, 20000, 11);
    const double mu_y = geometric_cv_mean(m, s0);

    double sp = 0.0, sp2 = 0.0, sc = 0.0, sc2 = 0.0;
    for (Index sim = 0; sim < g.number_sim(); ++sim) {
      double basket = 0.0, log_geo = 0.0;
      for (Index i = 0; i < d; ++i) {
        const double s = s0[static_cast<std::size_t>(i)] * g.values(sim, i);
        basket += m.weights[static_cast<std::size_t>(i)] * s;
        log_geo += m.weights[static_cast<std::size_t>(i)] * std::log(s);
      }
      const double pay = std::max(basket - 1.0, 0.0);
      const double corrected = pay - std::max(std::exp(log_geo) - 1.0, 0.0) + mu_y;
      sp += pay;
      sp2 += pay * pay;
      sc += corrected;
      sc2 += corrected * corrected;
    }
    const auto n = static_cast<double>(g.number_sim());
    const double var_plain = sp2 / n - (sp / n) * (sp / n);
    const double var_cv = sc2 / n - (sc / n) * (sc / n);
    CHECK(var_cv < var_plain);
  }
}

TEST_CASE("payoff-only price is monotone in each initial price") {
  BasketModel m = table4_model(4);
  GbmSampleMatrix g = simulate_gbm_matrix(m, 10000, 5);
  std::vector<double> s0 = {1.05, 1.2, 1.35, 1.1};
  const double base = basket_price_plain(m, g, s0);
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> bumped = s0;
    bumped[i] += 0.02;
    CHECK(basket_price_plain(m, g, bumped) - base >= -1e-9);
  }
}

TEST_CASE("full estimator is monotone up to the control-variate noise") {
  BasketModel m = table4_model(4);
  GbmSampleMatrix g = simulate_gbm_matrix(m, 10000, 5);
  std::vector<double> s0 = {1.05, 1.2, 1.35, 1.1};
  const double base = basket_price_cv(m, g, s0);
  for (std::size_t i = 0; i < 4; ++i) {
    std::vector<double> bumped = s0;
    bumped[i] += 0.02;
    CHECK(basket_price_cv(m, g, bumped) - base >= -1e-3);
  }
}

TEST_CASE("price is nonnegative up to statistical noise") {
  BasketModel m = table4_model(5);
  GbmSampleMatrix g = simulate_gbm_matrix(m, 10000, 21);
  Rng rng(22);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<double> s0;
    for (int i = 0; i < 5; ++i) s0.push_back(rng.uniform(0.5, 1.5));
    CHECK(basket_price_cv(m, g, s0) >= -1e-6);
  }
}

TEST_CASE("repeated prices over a frozen matrix are bitwise identical") {
  BasketModel m = table4_model(5);
  GbmSampleMatrix g = simulate_gbm_matrix(m, 1000, 31);
  const std::vector<double> s0 = {1.0, 1.1, 1.2, 1.3, 1.4};
  const double a = basket_price_cv(m, g, s0);
  const double b = basket_price_cv(m, g, s0);
  CHECK(a == b);
}

TEST_CASE("single-path price is affine away from the payoff kink") {
  BasketModel m = table4_model(3);
  GbmSampleMatrix g = simulate_gbm_matrix(m, 1, 8);
  Rng rng(9);
  int checked = 0;
  while (checked < 10) {
    std::vector<double> a, b;
    for (int i = 0; i < 3; ++i) {
      a.push_back(rng.uniform(1.0, 1.5));
      b.push_back(rng.uniform(1.0, 1.5));
    }
    std::vector<double> mid(3);
    for (int i = 0; i < 3; ++i) mid[static_cast<std::size_t>(i)] = 0.5 * (a[static_cast<std::size_t>(i)] + b[static_cast<std::size_t>(i)]);
    const double pa = basket_price_plain(m, g, a);
    const double pb = basket_price_plain(m, g, b);
    const double pm = basket_price_plain(m, g, mid);
    if (pa > 1e-6 && pb > 1e-6 && pm > 1e-6) {  // same (positive) sign pattern
      CHECK(std::abs(pm - 0.5 * (pa + pb)) <= 1e-12);
      ++checked;
    }
  }
}

TEST_CASE("exponential norm oracle values") {
  CHECK(test_oracle_exp_norm({0.0, 0.0, 0.0}) == 1.0);
  CHECK(test_oracle_exp_norm({1.0, 0.0, 0.0, 0.0}) ==
        doctest::Approx(0.36787944).epsilon(1e-8));
  CHECK(test_oracle_exp_norm({0.3, -0.4, 0.5}) ==
        test_oracle_exp_norm({0.5, 0.3, -0.4}));
}

TEST_CASE("single-path surfaces reproduce the known numerical ranks") {
  const std::array<std::array<double, 2>, 2> rect = {{{1.0, 1.5}, {1.0, 1.5}}};
  const struct {
    std::array<double, 2> alphas;
    Index rank;
  } cases[] = {{{0.9, 0.8}, 2}, {{0.4, 0.4}, 49}, {{0.1, 0.8}, 8}};
  for (const auto& c : cases) {
    auto analysis = single_path_surface(c.alphas, 1.0, 0.0, 0.25, rect, 50);
    CHECK(analysis.numerical_rank == c.rank);
  }
}

TEST_CASE("a strike above any payoff yields the zero surface of rank 0") {
  const std::array<std::array<double, 2>, 2> rect = {{{1.0, 1.5}, {1.0, 1.5}}};
  auto analysis = single_path_surface({0.5, 0.5}, 100.0, 0.0, 0.25, rect, 50);
  CHECK(analysis.numerical_rank == 0);
  CHECK(analysis.surface.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("random correlations are valid and reproducible") {
  CHECK(make_random_correlation(1, 3) == Matrix::Ones(1, 1));
  for (Index d : {2, 5, 10}) {
    Matrix c = make_random_correlation(d, 17);
    for (Index i = 0; i < d; ++i) CHECK(c(i, i) == 1.0);
    CHECK_NOTHROW(cholesky_factor(c));
    CHECK(make_random_correlation(d, 17) == c);
  }
}

TEST_CASE("sample matrix cache round trips bitwise") {
  BasketModel m = table4_model(3);
  GbmSampleMatrix g = simulate_gbm_matrix(m, 2000, 55);
  const auto path = std::filesystem::temp_directory_path() / "ttc_test_gbm.bin";
  write_gbm_matrix(path.string(), g);
  GbmSampleMatrix loaded = read_gbm_matrix(path.string());
  CHECK(loaded.values == g.values);
  CHECK(loaded.seed == g.seed);
  CHECK(loaded.model_hash == g.model_hash);
  std::filesystem::remove(path);
}

TEST_CASE("inverse normal CDF inverts the CDF to high accuracy") {
  // round trip only where the forward CDF itself is well conditioned
  for (double x = -8.0; x <= 4.0; x += 0.25) {
    const double p = normal_cdf(x);
    CHECK(inverse_normal_cdf(p) == doctest::Approx(x).epsilon(1e-12));
  }
  // standard quantiles
  CHECK(inverse_normal_cdf(0.5) == 0.0);
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-13));
  CHECK(inverse_normal_cdf(0.01) == doctest::Approx(-2.3263478740408408).epsilon(1e-13));
  // antisymmetry
  for (double p : {1e-4, 0.2, 0.37}) {
    CHECK(inverse_normal_cdf(p) + inverse_normal_cdf(1.0 - p) ==
          doctest::Approx(0.0).epsilon(1e-12));
  }
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::domain_error);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), std::domain_error);
}

}  // TEST_SUITE
