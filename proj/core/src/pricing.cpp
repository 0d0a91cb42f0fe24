#include "ttc/pricing.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include <Eigen/SVD>
#include <json.hpp>

#include "ttc/rng.hpp"
#include "ttc/tt_io.hpp"

namespace ttc {

namespace {

void check_s0(const BasketModel& model, const std::vector<double>& s0) {
  if (static_cast<Index>(s0.size()) != model.d) {
    throw std::domain_error("s0 has dimension " + std::to_string(s0.size()) +
                            ", model expects " + std::to_string(model.d));
  }
  for (double v : s0) {
    if (!(v > 0.0)) throw std::domain_error("initial prices must be positive");
  }
}

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

void BasketModel::validate() const {
  if (d < 1) throw std::domain_error("asset count must be >= 1");
  if (static_cast<Index>(sigmas.size()) != d) {
    throw std::domain_error("sigma count does not match asset count");
  }
  for (double s : sigmas) {
    // zero is allowed as the deterministic-drift limit
    if (!(s >= 0.0)) throw std::domain_error("volatilities must be nonnegative");
  }
  if (correlation.rows() != d || correlation.cols() != d) {
    throw std::domain_error("correlation matrix must be d x d");
  }
  if (static_cast<Index>(weights.size()) != d) {
    throw std::domain_error("weight count does not match asset count");
  }
  double sum = 0.0;
  for (double w : weights) sum += w;
  if (std::abs(sum - 1.0) > 1e-12) {
    throw std::domain_error("weights must sum to 1");
  }
  if (!(strike > 0.0)) throw std::domain_error("strike must be positive");
  if (!(maturity > 0.0)) throw std::domain_error("maturity must be positive");
  cholesky_factor(correlation);  // symmetric positive definite check
}

Matrix cholesky_factor(const Matrix& correlation) {
  const Index d = correlation.rows();
  if (correlation.cols() != d) throw std::domain_error("correlation must be square");
  for (Index i = 0; i < d; ++i) {
    if (std::abs(correlation(i, i) - 1.0) > 1e-10) {
      throw std::domain_error("correlation diagonal must be 1");
    }
    for (Index j = 0; j < i; ++j) {
      if (std::abs(correlation(i, j) - correlation(j, i)) > 1e-10) {
        throw std::domain_error("correlation must be symmetric");
      }
    }
  }
  Matrix l = Matrix::Zero(d, d);
  for (Index j = 0; j < d; ++j) {
    double s = correlation(j, j);
    for (Index k = 0; k < j; ++k) s -= l(j, k) * l(j, k);
    if (!(s > 0.0)) {
      throw std::runtime_error("Cholesky factorization failed at pivot " +
                               std::to_string(j + 1) +
                               ": matrix is not positive definite");
    }
    l(j, j) = std::sqrt(s);
    for (Index i = j + 1; i < d; ++i) {
      double t = correlation(i, j);
      for (Index k = 0; k < j; ++k) t -= l(i, k) * l(j, k);
      l(i, j) = t / l(j, j);
    }
  }
  return l;
}

std::uint64_t basket_model_hash(const BasketModel& model) {
  std::uint64_t h = 1469598103934665603ull;
  h = fnv1a(h, &model.d, sizeof(model.d));
  h = fnv1a(h, &model.rate, sizeof(double));
  h = fnv1a(h, model.sigmas.data(), model.sigmas.size() * sizeof(double));
  h = fnv1a(h, model.correlation.data(),
            static_cast<std::size_t>(model.correlation.size()) * sizeof(double));
  h = fnv1a(h, model.weights.data(), model.weights.size() * sizeof(double));
  h = fnv1a(h, &model.strike, sizeof(double));
  h = fnv1a(h, &model.maturity, sizeof(double));
  return h;
}

GbmSampleMatrix simulate_gbm_matrix(const BasketModel& model, Index number_sim,
                                    std::uint64_t seed) {
  model.validate();
  if (number_sim < 1) throw std::domain_error("number of simulations must be >= 1");
  const Matrix l = cholesky_factor(model.correlation);
  const double t = model.maturity;
  const double sqrt_t = std::sqrt(t);

  GbmSampleMatrix m;
  m.values.resize(number_sim, model.d);
  m.model_hash = basket_model_hash(model);
  m.seed = seed;

  Rng rng(seed);
  Vector eps(model.d);
  Vector x(model.d);
  for (Index sim = 0; sim < number_sim; ++sim) {
    for (Index i = 0; i < model.d; ++i) eps(i) = rng.normal();
    x = l * eps;
    for (Index stock = 0; stock < model.d; ++stock) {
      const double sigma = model.sigmas[static_cast<std::size_t>(stock)];
      m.values(sim, stock) =
          std::exp((model.rate - 0.5 * sigma * sigma) * t + sigma * x(stock) * sqrt_t);
    }
  }
  return m;
}

void write_gbm_matrix(const std::string& path, const GbmSampleMatrix& m) {
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  nlohmann::json header;
  header["format"] = "GBM1";
  header["model_hash"] = m.model_hash;
  header["seed"] = m.seed;
  header["number_sim"] = m.number_sim();
  header["assets"] = m.assets();
  header["layout"] = "column-major";
  const std::string json = header.dump();
  os.write("GBM1", 4);
  io::write_u64(os, json.size());
  os.write(json.data(), static_cast<std::streamsize>(json.size()));
  io::write_f64_array(os, m.values.data(), static_cast<std::size_t>(m.values.size()));
  if (!os) throw std::runtime_error("write failed for " + path);
}

GbmSampleMatrix read_gbm_matrix(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "GBM1", 4) != 0) {
    throw std::runtime_error(path + " is not a GBM1 cache file");
  }
  const auto json_len = io::read_u64(is);
  std::string json(json_len, '\0');
  is.read(json.data(), static_cast<std::streamsize>(json_len));
  if (!is) throw std::runtime_error("truncated header in " + path);
  const auto header = nlohmann::json::parse(json);

  GbmSampleMatrix m;
  m.model_hash = header.at("model_hash").get<std::uint64_t>();
  m.seed = header.at("seed").get<std::uint64_t>();
  const auto rows = header.at("number_sim").get<Index>();
  const auto cols = header.at("assets").get<Index>();
  m.values.resize(rows, cols);
  io::read_f64_array(is, m.values.data(), static_cast<std::size_t>(m.values.size()));
  return m;
}

double geometric_cv_mean(const BasketModel& model, const std::vector<double>& s0) {
  model.validate();
  check_s0(model, s0);
  const double t = model.maturity;

  double mean = 0.0;
  for (Index i = 0; i < model.d; ++i) {
    const double sigma = model.sigmas[static_cast<std::size_t>(i)];
    mean += model.weights[static_cast<std::size_t>(i)] *
            (std::log(s0[static_cast<std::size_t>(i)]) +
             (model.rate - 0.5 * sigma * sigma) * t);
  }
  Vector ws(model.d);
  for (Index i = 0; i < model.d; ++i) {
    ws(i) = model.weights[static_cast<std::size_t>(i)] *
            model.sigmas[static_cast<std::size_t>(i)];
  }
  const double var = t * ws.dot(model.correlation * ws);
  const double k = model.strike;

  if (var <= 0.0) return std::max(std::exp(mean) - k, 0.0);
  const double s = std::sqrt(var);
  const double d1 = (mean - std::log(k) + var) / s;
  const double d2 = d1 - s;
  return std::exp(mean + 0.5 * var) * normal_cdf(d1) - k * normal_cdf(d2);
}

double basket_price_cv(const BasketModel& model, const GbmSampleMatrix& m,
                       const std::vector<double>& s0) {
  check_s0(model, s0);
  if (m.assets() != model.d) {
    throw std::domain_error("sample matrix asset count does not match the model");
  }
  const double mu_y = geometric_cv_mean(model, s0);
  const Index n = m.number_sim();

  double acc = 0.0;
  for (Index sim = 0; sim < n; ++sim) {
    double basket = 0.0;
    double log_geo = 0.0;
    for (Index i = 0; i < model.d; ++i) {
      const double s = s0[static_cast<std::size_t>(i)] * m.values(sim, i);
      const double w = model.weights[static_cast<std::size_t>(i)];
      basket += w * s;
      log_geo += w * std::log(s);
    }
    const double payoff = std::max(basket - model.strike, 0.0);
    const double control = std::max(std::exp(log_geo) - model.strike, 0.0);
    acc += payoff - control;
  }
  return std::exp(-model.rate * model.maturity) *
         (acc / static_cast<double>(n) + mu_y);
}

double basket_price_plain(const BasketModel& model, const GbmSampleMatrix& m,
                          const std::vector<double>& s0) {
  check_s0(model, s0);
  if (m.assets() != model.d) {
    throw std::domain_error("sample matrix asset count does not match the model");
  }
  const Index n = m.number_sim();
  double acc = 0.0;
  for (Index sim = 0; sim < n; ++sim) {
    double basket = 0.0;
    for (Index i = 0; i < model.d; ++i) {
      basket += model.weights[static_cast<std::size_t>(i)] *
                s0[static_cast<std::size_t>(i)] * m.values(sim, i);
    }
    acc += std::max(basket - model.strike, 0.0);
  }
  return std::exp(-model.rate * model.maturity) * acc / static_cast<double>(n);
}

std::pair<double, double> geometric_payoff_mc(const BasketModel& model,
                                              const GbmSampleMatrix& m,
                                              const std::vector<double>& s0) {
  check_s0(model, s0);
  if (m.assets() != model.d) {
    throw std::domain_error("sample matrix asset count does not match the model");
  }
  const Index n = m.number_sim();
  double acc = 0.0, acc2 = 0.0;
  for (Index sim = 0; sim < n; ++sim) {
    double log_geo = 0.0;
    for (Index i = 0; i < model.d; ++i) {
      log_geo += model.weights[static_cast<std::size_t>(i)] *
                 std::log(s0[static_cast<std::size_t>(i)] * m.values(sim, i));
    }
    const double y = std::max(std::exp(log_geo) - model.strike, 0.0);
    acc += y;
    acc2 += y * y;
  }
  const double mean = acc / static_cast<double>(n);
  const double var =
      std::max(acc2 / static_cast<double>(n) - mean * mean, 0.0);
  return {mean, std::sqrt(var / static_cast<double>(n))};
}

double test_oracle_exp_norm(const std::vector<double>& x) {
  double s = 0.0;
  for (double v : x) s += v * v;
  return std::exp(-std::sqrt(s));
}

std::pair<Vector, Index> singular_values_and_rank(const Matrix& m, double rel_tol) {
  Eigen::BDCSVD<Matrix> svd(m);
  Vector sigma = svd.singularValues();
  const double threshold = rel_tol * (sigma.size() > 0 ? sigma(0) : 0.0);
  Index rank = 0;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > threshold) ++rank;
  }
  return {std::move(sigma), rank};
}

SurfaceAnalysis single_path_surface(const std::array<double, 2>& alphas, double strike,
                                    double rate, double maturity,
                                    const std::array<std::array<double, 2>, 2>& rect,
                                    Index points_per_dim, double rank_rel_tol) {
  if (points_per_dim < 2) throw std::domain_error("need at least 2 grid points");
  const double disc = std::exp(-rate * maturity);
  SurfaceAnalysis out;
  out.surface.resize(points_per_dim, points_per_dim);
  for (Index i = 0; i < points_per_dim; ++i) {
    const double s1 = rect[0][0] + (rect[0][1] - rect[0][0]) *
                                       static_cast<double>(i) /
                                       static_cast<double>(points_per_dim - 1);
    for (Index j = 0; j < points_per_dim; ++j) {
      const double s2 = rect[1][0] + (rect[1][1] - rect[1][0]) *
                                         static_cast<double>(j) /
                                         static_cast<double>(points_per_dim - 1);
      out.surface(i, j) =
          disc * std::max(alphas[0] * s1 + alphas[1] * s2 - strike, 0.0);
    }
  }
  auto [sigma, rank] = singular_values_and_rank(out.surface, rank_rel_tol);
  out.singular_values = std::move(sigma);
  out.numerical_rank = rank;
  return out;
}

Matrix make_random_correlation(Index d, std::uint64_t seed) {
  if (d < 1) throw std::domain_error("dimension must be >= 1");
  if (d == 1) return Matrix::Ones(1, 1);
  Rng rng(seed);
  Matrix g(d, d + 2);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d + 2; ++j) g(i, j) = rng.normal();
    g.row(i).normalize();
  }
  Matrix c = g * g.transpose();
  for (Index i = 0; i < d; ++i) c(i, i) = 1.0;
  // enforce exact symmetry against fp noise in the Gram product
  c = 0.5 * (c + c.transpose()).eval();
  for (Index i = 0; i < d; ++i) c(i, i) = 1.0;
  return c;
}

}  // namespace ttc
