#include "ttc/tt_ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/QR>
#include <Eigen/SVD>

#include "ttc/rng.hpp"

namespace ttc {

namespace {

Index truncation_rank(const Vector& sigma, double rel_tol, Index cap) {
  const double threshold = rel_tol * sigma(0);
  Index r = 0;
  for (Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) > threshold) ++r;
  }
  r = std::max<Index>(r, 1);
  return std::min(r, cap);
}

void check_rank_chain(const std::vector<Index>& ranks, Index d, const char* what) {
  if (static_cast<Index>(ranks.size()) != d + 1) {
    throw std::domain_error(std::string(what) + " must have length order + 1");
  }
  if (ranks.front() != 1 || ranks.back() != 1) {
    throw std::domain_error(std::string(what) + " must have boundary entries 1");
  }
  for (Index r : ranks) {
    if (r < 1) throw std::domain_error(std::string(what) + " entries must be >= 1");
  }
}

}  // namespace

TTTensor tt_svd(const DenseTensor& t, const std::vector<Index>& max_ranks,
                double rel_tol) {
  const Index d = t.order();
  check_rank_chain(max_ranks, d, "max_ranks");
  if (rel_tol < 0.0) throw std::domain_error("rel_tol must be >= 0");

  std::vector<Index> ranks(static_cast<std::size_t>(d + 1), 1);
  std::vector<std::vector<double>> cores(static_cast<std::size_t>(d));

  if (d == 1) {
    cores[0] = t.values;
    return TTTensor::from_cores(t.dims, ranks, std::move(cores));
  }

  std::vector<double> work = t.values;
  Index r_prev = 1;
  Index cols = t.size();  // columns of the unfolding not yet consumed, * r_prev
  for (Index mu = 1; mu < d; ++mu) {
    const Index n = t.dims[static_cast<std::size_t>(mu - 1)];
    const Index rows = r_prev * n;
    cols = static_cast<Index>(work.size()) / rows;
    Eigen::Map<const Matrix> w(work.data(), rows, cols);

    Eigen::BDCSVD<Matrix> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Index cap = std::min(max_ranks[static_cast<std::size_t>(mu)],
                               std::min(rows, cols));
    const Index r = truncation_rank(svd.singularValues(), rel_tol, cap);

    Matrix u = svd.matrixU().leftCols(r);
    cores[static_cast<std::size_t>(mu - 1)].assign(u.data(), u.data() + u.size());
    ranks[static_cast<std::size_t>(mu)] = r;

    Matrix carry = svd.singularValues().head(r).asDiagonal() *
                   svd.matrixV().leftCols(r).transpose();  // r x cols
    work.assign(carry.data(), carry.data() + carry.size());
    r_prev = r;
  }
  cores[static_cast<std::size_t>(d - 1)] = std::move(work);
  return TTTensor::from_cores(t.dims, std::move(ranks), std::move(cores));
}

TTTensor tt_round(const TTTensor& x, const std::vector<Index>& target_ranks) {
  const Index d = x.order();
  check_rank_chain(target_ranks, d, "target rank chain");
  if (d == 1) return x;

  std::vector<Index> dims = x.dims();
  std::vector<Index> ranks = x.ranks();
  std::vector<std::vector<double>> cores(static_cast<std::size_t>(d));
  for (Index mu = 1; mu <= d; ++mu) {
    cores[static_cast<std::size_t>(mu - 1)] = x.core(mu);
  }

  auto dim_at = [&](Index mu) { return dims[static_cast<std::size_t>(mu - 1)]; };
  auto rank_at = [&](Index mu) -> Index& { return ranks[static_cast<std::size_t>(mu)]; };
  auto core_at = [&](Index mu) -> std::vector<double>& {
    return cores[static_cast<std::size_t>(mu - 1)];
  };

  // Right-to-left orthogonalization: QR of the transposed right unfolding.
  for (Index mu = d; mu >= 2; --mu) {
    const Index r0 = rank_at(mu - 1), n = dim_at(mu), r1 = rank_at(mu);
    Eigen::Map<const Matrix> right(core_at(mu).data(), r0, n * r1);
    Matrix rt = right.transpose();
    Eigen::HouseholderQR<Matrix> qr(rt);
    const Index k = std::min(n * r1, r0);
    Matrix q = qr.householderQ() * Matrix::Identity(n * r1, k);
    Matrix rfac = qr.matrixQR().topLeftCorner(k, r0).triangularView<Eigen::Upper>();

    Matrix qt = q.transpose();  // k x (n r1): the new right unfolding
    core_at(mu).assign(qt.data(), qt.data() + qt.size());

    Eigen::Map<const Matrix> left(core_at(mu - 1).data(),
                                  rank_at(mu - 2) * dim_at(mu - 1), r0);
    Matrix merged = left * rfac.transpose();  // absorb the triangular factor
    core_at(mu - 1).assign(merged.data(), merged.data() + merged.size());
    rank_at(mu - 1) = k;
  }

  // Left-to-right truncation sweep.
  for (Index mu = 1; mu < d; ++mu) {
    const Index r0 = rank_at(mu - 1), n = dim_at(mu), r1 = rank_at(mu);
    Eigen::Map<const Matrix> left(core_at(mu).data(), r0 * n, r1);
    Eigen::BDCSVD<Matrix> svd(left, Eigen::ComputeThinU | Eigen::ComputeThinV);
    const Index available = std::min(r0 * n, r1);
    const Index r_new =
        std::max<Index>(1, std::min(target_ranks[static_cast<std::size_t>(mu)],
                                    available));

    Matrix u = svd.matrixU().leftCols(r_new);
    core_at(mu).assign(u.data(), u.data() + u.size());

    Matrix carry = svd.singularValues().head(r_new).asDiagonal() *
                   svd.matrixV().leftCols(r_new).transpose();  // r_new x r1
    Eigen::Map<const Matrix> next_right(core_at(mu + 1).data(), r1,
                                        dim_at(mu + 1) * rank_at(mu + 1));
    Matrix merged = carry * next_right;
    core_at(mu + 1).assign(merged.data(), merged.data() + merged.size());
    rank_at(mu) = r_new;
  }

  return TTTensor::from_cores(std::move(dims), std::move(ranks), std::move(cores));
}

double tt_entry(const TTTensor& x, const MultiIndex& idx) {
  check_multi_index(x.dims(), idx);
  Eigen::RowVectorXd v = Eigen::RowVectorXd::Ones(1);
  for (Index mu = 1; mu <= x.order(); ++mu) {
    v = v * x.core_slice(mu, idx[static_cast<std::size_t>(mu - 1)]);
  }
  return v(0);
}

double inner_product(const TTTensor& x, const TTTensor& y) {
  if (x.dims() != y.dims()) {
    throw std::domain_error("inner product requires identical dims");
  }
  Matrix w = Matrix::Ones(1, 1);  // ranks: y-side x x-side
  for (Index mu = 1; mu <= x.order(); ++mu) {
    const Index n = x.dim(mu);
    const Index rx1 = x.rank(mu);
    const Index ry0 = y.rank(mu - 1);
    Matrix t = w * x.core_right(mu);  // ry0 x (n rx1)
    Eigen::Map<const Matrix> t2(t.data(), ry0 * n, rx1);
    w = y.core_left(mu).transpose() * t2;  // ry1 x rx1
  }
  return w(0, 0);
}

double tt_norm(const TTTensor& x) {
  const double ip = inner_product(x, x);
  return std::sqrt(std::max(ip, 0.0));
}

TTTensor mode_multiply(const TTTensor& x, Index mu, const Matrix& m) {
  const Index d = x.order();
  if (mu < 1 || mu > d) throw std::domain_error("mode index out of range");
  const Index n = x.dim(mu);
  if (m.cols() != n) {
    throw std::domain_error("matrix has " + std::to_string(m.cols()) +
                            " columns, mode " + std::to_string(mu) + " has size " +
                            std::to_string(n));
  }
  const Index r0 = x.rank(mu - 1), r1 = x.rank(mu);
  const Index rows = m.rows();

  std::vector<double> data(static_cast<std::size_t>(r0 * rows * r1));
  const double* src = x.core(mu).data();
  for (Index k2 = 0; k2 < r1; ++k2) {
    Eigen::Map<const Matrix> block(src + k2 * r0 * n, r0, n);
    Eigen::Map<Matrix> out(data.data() + k2 * r0 * rows, r0, rows);
    out = block * m.transpose();
  }

  std::vector<Index> dims = x.dims();
  dims[static_cast<std::size_t>(mu - 1)] = rows;
  std::vector<std::vector<double>> cores(static_cast<std::size_t>(d));
  for (Index k = 1; k <= d; ++k) {
    cores[static_cast<std::size_t>(k - 1)] =
        (k == mu) ? std::move(data) : x.core(k);
  }
  return TTTensor::from_cores(std::move(dims), x.ranks(), std::move(cores));
}

DenseTensor tt_to_dense(const TTTensor& x) {
  Matrix p = x.core_left(1);  // n1 x r1
  for (Index mu = 2; mu <= x.order(); ++mu) {
    Matrix t = p * x.core_right(mu);  // N x (n r1)
    p = Eigen::Map<const Matrix>(t.data(), p.rows() * x.dim(mu), x.rank(mu));
  }
  std::vector<double> values(p.data(), p.data() + p.size());
  return DenseTensor(x.dims(), std::move(values));
}

StorageBytes storage_bytes(const TTTensor& x) {
  std::uint64_t tt = 0;
  for (Index mu = 1; mu <= x.order(); ++mu) {
    tt += 8u * static_cast<std::uint64_t>(x.rank(mu - 1)) *
          static_cast<std::uint64_t>(x.dim(mu)) *
          static_cast<std::uint64_t>(x.rank(mu));
  }
  std::uint64_t full = 8;
  const std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
  for (Index n : x.dims()) {
    const auto un = static_cast<std::uint64_t>(n);
    if (full > cap / un) {
      full = cap;
      break;
    }
    full *= un;
  }
  return {tt, full};
}

double storage_full_bytes_approx(const std::vector<Index>& dims) {
  double full = 8.0;
  for (Index n : dims) full *= static_cast<double>(n);
  return full;
}

TTTensor tt_random(const std::vector<Index>& dims, const std::vector<Index>& ranks,
                   Rng& rng) {
  const Index d = static_cast<Index>(dims.size());
  check_rank_chain(ranks, d, "rank chain");
  std::vector<std::vector<double>> cores(static_cast<std::size_t>(d));
  for (Index mu = 1; mu <= d; ++mu) {
    const auto size = static_cast<std::size_t>(
        ranks[static_cast<std::size_t>(mu - 1)] *
        dims[static_cast<std::size_t>(mu - 1)] * ranks[static_cast<std::size_t>(mu)]);
    auto& c = cores[static_cast<std::size_t>(mu - 1)];
    c.resize(size);
    for (double& v : c) v = rng.uniform(-1.0, 1.0);
  }
  return TTTensor::from_cores(dims, ranks, std::move(cores));
}

TTTensor tt_rank_one(const std::vector<Vector>& factors) {
  if (factors.empty()) throw std::domain_error("need at least one factor");
  std::vector<Index> dims;
  std::vector<std::vector<double>> cores;
  for (const auto& f : factors) {
    if (f.size() < 1) throw std::domain_error("factors must be nonempty");
    dims.push_back(f.size());
    cores.emplace_back(f.data(), f.data() + f.size());
  }
  std::vector<Index> ranks(factors.size() + 1, 1);
  return TTTensor::from_cores(std::move(dims), std::move(ranks), std::move(cores));
}

}  // namespace ttc
