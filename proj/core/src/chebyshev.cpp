#include "ttc/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

#include <fftw3.h>
#include <json.hpp>

#include "ttc/tt_io.hpp"
#include "ttc/tt_ops.hpp"

namespace ttc {

namespace {

constexpr double kDomainSlack = 1e-10;  // fp slack for boundary points

double pullback(const Domain& domain, double p, Index i) {
  const double lo = domain.lower(i), hi = domain.upper(i);
  return 2.0 * (p - lo) / (hi - lo) - 1.0;
}

void check_point_dim(const ChebyshevGrid& grid, const std::vector<double>& p) {
  if (static_cast<Index>(p.size()) != grid.dim()) {
    throw std::domain_error("parameter point has dimension " +
                            std::to_string(p.size()) + ", grid expects " +
                            std::to_string(grid.dim()));
  }
}

// Chebyshev values T_0..T_n at x by the three-term recurrence.
std::vector<double> chebyshev_values(double x, Index n) {
  std::vector<double> t(static_cast<std::size_t>(n + 1));
  t[0] = 1.0;
  if (n >= 1) t[1] = x;
  for (Index j = 2; j <= n; ++j) {
    t[static_cast<std::size_t>(j)] =
        2.0 * x * t[static_cast<std::size_t>(j - 1)] - t[static_cast<std::size_t>(j - 2)];
  }
  return t;
}

std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

/// Applies F_n to every middle-mode fiber of a TT core via a type-I DCT
/// (REDFT00), with the boundary halving folded into the output scaling:
/// F_n v = (w_j / n) * REDFT00(v)_j.
void apply_coeff_dct(std::vector<double>& core, Index r0, Index big_n, Index r1) {
  const Index n = big_n - 1;
  if (n == 0) return;  // F_0 = [1]

  double* in = fftw_alloc_real(static_cast<std::size_t>(big_n));
  double* out = fftw_alloc_real(static_cast<std::size_t>(big_n));
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    plan = fftw_plan_r2r_1d(static_cast<int>(big_n), in, out, FFTW_REDFT00,
                            FFTW_ESTIMATE);
  }

  for (Index k2 = 0; k2 < r1; ++k2) {
    for (Index a = 0; a < r0; ++a) {
      double* fiber = core.data() + a + r0 * big_n * k2;
      for (Index i = 0; i < big_n; ++i) in[i] = fiber[r0 * i];
      fftw_execute(plan);
      const double inv_n = 1.0 / static_cast<double>(n);
      for (Index j = 0; j <= n; ++j) {
        const double w = (j == 0 || j == n) ? 0.5 : 1.0;
        fiber[r0 * j] = w * inv_n * out[j];
      }
    }
  }

  {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(plan);
  }
  fftw_free(in);
  fftw_free(out);
}

}  // namespace

void Domain::validate() const {
  if (intervals.empty()) throw std::domain_error("domain must have dimension >= 1");
  for (std::size_t i = 0; i < intervals.size(); ++i) {
    if (!(intervals[i][0] < intervals[i][1])) {
      throw std::domain_error("domain interval " + std::to_string(i + 1) +
                              " must have lower < upper");
    }
  }
}

std::vector<Index> ChebyshevGrid::shape() const {
  std::vector<Index> s(orders.size());
  for (std::size_t i = 0; i < orders.size(); ++i) s[i] = orders[i] + 1;
  return s;
}

double ChebyshevGrid::reference_node(Index dim_i, Index k) const {
  const Index n = orders[static_cast<std::size_t>(dim_i - 1)];
  if (k < 0 || k > n) throw std::domain_error("node index out of range");
  if (n == 0) return 1.0;
  return std::cos(M_PI * static_cast<double>(k) / static_cast<double>(n));
}

void ChebyshevGrid::validate() const {
  domain.validate();
  if (static_cast<Index>(orders.size()) != domain.dim()) {
    throw std::domain_error("orders and domain dimension differ");
  }
  for (Index n : orders) {
    if (n < 0) throw std::domain_error("interpolation orders must be >= 0");
  }
}

std::vector<double> grid_point(const ChebyshevGrid& grid, const MultiIndex& idx) {
  check_multi_index(grid.shape(), idx);
  std::vector<double> p(static_cast<std::size_t>(grid.dim()));
  for (Index i = 1; i <= grid.dim(); ++i) {
    const double q = grid.reference_node(i, idx[static_cast<std::size_t>(i - 1)] - 1);
    p[static_cast<std::size_t>(i - 1)] =
        grid.domain.lower(i) + 0.5 * (q + 1.0) * (grid.domain.upper(i) - grid.domain.lower(i));
  }
  return p;
}

Matrix build_coeff_matrix(Index n) {
  if (n < 0) throw std::domain_error("order must be >= 0");
  if (n == 0) return Matrix::Ones(1, 1);
  Matrix f(n + 1, n + 1);
  for (Index j = 0; j <= n; ++j) {
    const double wj = (j == 0 || j == n) ? 0.5 : 1.0;
    for (Index k = 0; k <= n; ++k) {
      const double wk = (k == 0 || k == n) ? 0.5 : 1.0;
      f(j, k) = 2.0 / static_cast<double>(n) * wj * wk *
                std::cos(M_PI * static_cast<double>(j * k) / static_cast<double>(n));
    }
  }
  return f;
}

Interpolant coeffs_from_values(const TTTensor& values, const ChebyshevGrid& grid,
                               TransformPath path) {
  grid.validate();
  if (values.dims() != grid.shape()) {
    throw std::domain_error("value tensor dims do not match the grid shape");
  }

  if (path == TransformPath::dense) {
    TTTensor coeffs = values;
    Matrix f;
    Index built_for = -1;
    for (Index mu = 1; mu <= coeffs.order(); ++mu) {
      const Index n = grid.orders[static_cast<std::size_t>(mu - 1)];
      if (n != built_for) {  // orders often coincide; build F_n once per size
        f = build_coeff_matrix(n);
        built_for = n;
      }
      coeffs = mode_multiply(coeffs, mu, f);
    }
    return {std::move(coeffs), grid};
  }

  TTTensor coeffs = values;
  for (Index mu = 1; mu <= coeffs.order(); ++mu) {
    apply_coeff_dct(coeffs.core(mu), coeffs.rank(mu - 1), coeffs.dim(mu),
                    coeffs.rank(mu));
  }
  return {std::move(coeffs), grid};
}

TTTensor basis_rank_one(const ChebyshevGrid& grid, const std::vector<double>& p,
                        bool allow_extrapolation) {
  grid.validate();
  check_point_dim(grid, p);
  std::vector<Vector> factors;
  factors.reserve(p.size());
  for (Index i = 1; i <= grid.dim(); ++i) {
    const double x = pullback(grid.domain, p[static_cast<std::size_t>(i - 1)], i);
    if (!allow_extrapolation && (x < -1.0 - kDomainSlack || x > 1.0 + kDomainSlack)) {
      throw ExtrapolationError(
          "parameter component " + std::to_string(i) + " = " +
          std::to_string(p[static_cast<std::size_t>(i - 1)]) +
          " lies outside the domain (pass allow_extrapolation to override)");
    }
    const auto t = chebyshev_values(x, grid.orders[static_cast<std::size_t>(i - 1)]);
    factors.push_back(Eigen::Map<const Vector>(t.data(), static_cast<Index>(t.size())));
  }
  return tt_rank_one(factors);
}

double evaluate(const Interpolant& interp, const std::vector<double>& p,
                bool allow_extrapolation) {
  return inner_product(interp.coeffs, basis_rank_one(interp.grid, p, allow_extrapolation));
}

double evaluate_dense_oracle(const DenseTensor& values, const ChebyshevGrid& grid,
                             const std::vector<double>& p) {
  grid.validate();
  check_point_dim(grid, p);
  if (values.dims != grid.shape()) {
    throw std::domain_error("value tensor dims do not match the grid shape");
  }
  const Index total = values.size();
  if (total > 1000000) {
    throw std::domain_error("dense oracle refused beyond 1e6 grid entries");
  }
  const Index d = grid.dim();
  const auto shape = grid.shape();

  // Per-dimension tables: cos(j pi k / n), quadrature halving weights and the
  // coefficient prefactors of the primed double sum.
  std::vector<Matrix> cos_table(static_cast<std::size_t>(d));
  std::vector<std::vector<double>> half_w(static_cast<std::size_t>(d));
  std::vector<std::vector<double>> prefactor(static_cast<std::size_t>(d));
  std::vector<std::vector<double>> basis(static_cast<std::size_t>(d));
  for (Index i = 0; i < d; ++i) {
    const Index n = grid.orders[static_cast<std::size_t>(i)];
    const Index big_n = n + 1;
    Matrix& tab = cos_table[static_cast<std::size_t>(i)];
    tab.resize(big_n, big_n);
    auto& w = half_w[static_cast<std::size_t>(i)];
    auto& fac = prefactor[static_cast<std::size_t>(i)];
    w.resize(static_cast<std::size_t>(big_n));
    fac.resize(static_cast<std::size_t>(big_n));
    for (Index j = 0; j < big_n; ++j) {
      w[static_cast<std::size_t>(j)] = (n > 0 && (j == 0 || j == n)) ? 0.5 : 1.0;
      fac[static_cast<std::size_t>(j)] =
          n == 0 ? 1.0
                 : ((n > j && j > 0) ? 2.0 : 1.0) / static_cast<double>(n);
      for (Index k = 0; k < big_n; ++k) {
        tab(j, k) = n == 0 ? 1.0
                           : std::cos(M_PI * static_cast<double>(j * k) /
                                      static_cast<double>(n));
      }
    }
    const double x = std::clamp(
        pullback(grid.domain, p[static_cast<std::size_t>(i)], static_cast<Index>(i + 1)),
        -1.0, 1.0);
    auto& b = basis[static_cast<std::size_t>(i)];
    b.resize(static_cast<std::size_t>(big_n));
    for (Index j = 0; j < big_n; ++j) {
      b[static_cast<std::size_t>(j)] =
          std::cos(static_cast<double>(j) * std::acos(x));
    }
  }

  double value = 0.0;
  std::vector<Index> j(static_cast<std::size_t>(d), 0);
  for (Index lin_j = 0; lin_j < total; ++lin_j) {
    double coeff = 0.0;
    std::vector<Index> k(static_cast<std::size_t>(d), 0);
    for (Index lin_k = 0; lin_k < total; ++lin_k) {
      double term = values.values[static_cast<std::size_t>(lin_k)];
      for (Index i = 0; i < d; ++i) {
        const auto ji = j[static_cast<std::size_t>(i)];
        const auto ki = k[static_cast<std::size_t>(i)];
        term *= half_w[static_cast<std::size_t>(i)][static_cast<std::size_t>(ki)] *
                cos_table[static_cast<std::size_t>(i)](ji, ki);
      }
      coeff += term;
      for (Index i = 0; i < d; ++i) {
        if (++k[static_cast<std::size_t>(i)] < shape[static_cast<std::size_t>(i)]) break;
        k[static_cast<std::size_t>(i)] = 0;
      }
    }
    double term = coeff;
    for (Index i = 0; i < d; ++i) {
      const auto ji = j[static_cast<std::size_t>(i)];
      term *= prefactor[static_cast<std::size_t>(i)][static_cast<std::size_t>(ji)] *
              basis[static_cast<std::size_t>(i)][static_cast<std::size_t>(ji)];
    }
    value += term;
    for (Index i = 0; i < d; ++i) {
      if (++j[static_cast<std::size_t>(i)] < shape[static_cast<std::size_t>(i)]) break;
      j[static_cast<std::size_t>(i)] = 0;
    }
  }
  return value;
}

void write_interpolant(const std::string& path, const Interpolant& interp) {
  interp.grid.validate();
  if (interp.coeffs.dims() != interp.grid.shape()) {
    throw std::domain_error("coefficient dims do not match the grid shape");
  }
  write_ttc1_binary(path, interp.coeffs);
  nlohmann::json sidecar;
  sidecar["format"] = "TTC1";
  sidecar["order"] = interp.coeffs.order();
  sidecar["dims"] = interp.coeffs.dims();
  sidecar["ranks"] = interp.coeffs.ranks();
  sidecar["chebyshev_orders"] = interp.grid.orders;
  auto& dom = sidecar["domain"] = nlohmann::json::array();
  for (const auto& iv : interp.grid.domain.intervals) dom.push_back({iv[0], iv[1]});
  std::ofstream os(path + ".json", std::ios::trunc);
  if (!os) throw std::runtime_error("cannot open " + path + ".json for writing");
  os << sidecar.dump(2) << "\n";
}

Interpolant read_interpolant(const std::string& path) {
  TTTensor coeffs = read_ttc1_binary(path);
  std::ifstream is(path + ".json");
  if (!is) throw std::runtime_error("cannot open sidecar " + path + ".json");
  nlohmann::json sidecar = nlohmann::json::parse(is);
  if (!sidecar.contains("chebyshev_orders") || !sidecar.contains("domain")) {
    throw std::runtime_error(path + ".json does not describe an interpolant");
  }
  ChebyshevGrid grid;
  grid.orders = sidecar["chebyshev_orders"].get<std::vector<Index>>();
  for (const auto& iv : sidecar["domain"]) {
    grid.domain.intervals.push_back({iv[0].get<double>(), iv[1].get<double>()});
  }
  grid.validate();
  if (coeffs.dims() != grid.shape()) {
    throw std::runtime_error("sidecar grid does not match the stored tensor");
  }
  return {std::move(coeffs), std::move(grid)};
}

}  // namespace ttc
