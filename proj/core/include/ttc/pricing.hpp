#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "ttc/dense_tensor.hpp"

namespace ttc {

/// Multivariate Black-Scholes basket: d assets with fixed rate, volatilities
/// and correlation; the initial prices s0 are the varying parameters.
struct BasketModel {
  Index d = 0;
  double rate = 0.0;
  std::vector<double> sigmas;
  Matrix correlation;
  std::vector<double> weights;  // must sum to 1
  double strike = 1.0;
  double maturity = 1.0;

  void validate() const;
};

/// Lower-triangular L with L L^T = correlation. Throws naming the failing
/// pivot when the matrix is not positive definite.
Matrix cholesky_factor(const Matrix& correlation);

std::uint64_t basket_model_hash(const BasketModel& model);

/// Pre-simulated terminal GBM factors exp((r - sigma^2/2) T + sigma x sqrt(T)),
/// one row per simulation, one column per asset. Frozen and shared across all
/// price evaluations, so each price is a deterministic function of s0.
struct GbmSampleMatrix {
  Matrix values;
  std::uint64_t model_hash = 0;
  std::uint64_t seed = 0;

  Index number_sim() const { return values.rows(); }
  Index assets() const { return values.cols(); }
};

GbmSampleMatrix simulate_gbm_matrix(const BasketModel& model, Index number_sim,
                                    std::uint64_t seed);

/// Cache file: magic "GBM1", JSON provenance header, raw little-endian doubles.
void write_gbm_matrix(const std::string& path, const GbmSampleMatrix& m);
GbmSampleMatrix read_gbm_matrix(const std::string& path);

/// Closed-form E[(G - K)^+] for the geometric basket G = exp(sum w_i log S_T^i),
/// which is lognormal under the model. This is the control-variate mean mu_Y.
double geometric_cv_mean(const BasketModel& model, const std::vector<double>& s0);

/// Monte Carlo basket price over the frozen sample matrix with the geometric
/// control variate: e^{-rT} mean(payoff - (control - mu_Y)).
double basket_price_cv(const BasketModel& model, const GbmSampleMatrix& m,
                       const std::vector<double>& s0);

/// Plain Monte Carlo basket price (payoff only) over the frozen matrix.
double basket_price_plain(const BasketModel& model, const GbmSampleMatrix& m,
                          const std::vector<double>& s0);

/// Plain Monte Carlo estimate of E[(G - K)^+]: (mean, standard error).
std::pair<double, double> geometric_payoff_mc(const BasketModel& model,
                                              const GbmSampleMatrix& m,
                                              const std::vector<double>& s0);

/// f(x) = exp(-||x||_2).
double test_oracle_exp_norm(const std::vector<double>& x);

/// Singular values (descending) and the count above rel_tol * sigma_max.
std::pair<Vector, Index> singular_values_and_rank(const Matrix& m, double rel_tol);

struct SurfaceAnalysis {
  Matrix surface;
  Vector singular_values;
  Index numerical_rank = 0;
};

/// Single-path price surface p(s1, s2) = e^{-rT} (a1 s1 + a2 s2 - K)^+ on an
/// equispaced grid over the rectangle, with its singular value spectrum.
SurfaceAnalysis single_path_surface(const std::array<double, 2>& alphas, double strike,
                                    double rate, double maturity,
                                    const std::array<std::array<double, 2>, 2>& rect,
                                    Index points_per_dim, double rank_rel_tol = 1e-10);

/// Random correlation matrix: Gram matrix of d unit-normalized Gaussian
/// vectors of dimension d+2, diagonal set to exactly 1.
Matrix make_random_correlation(Index d, std::uint64_t seed);

}  // namespace ttc
