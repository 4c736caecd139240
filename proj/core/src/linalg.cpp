#include "csbm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include <lapacke.h>

#include "csbm/errors.hpp"

namespace csbm {

BlockView BlockView::split(const MatrixXd& M, Index n) {
  const Index N = M.rows();
  const Index m = N - n;
  return {M.topLeftCorner(n, n), M.topRightCorner(n, m), M.bottomLeftCorner(m, n),
          M.bottomRightCorner(m, m)};
}

MatrixXd BlockView::reassemble() const {
  const Index n = LL.rows();
  const Index m = UU.rows();
  MatrixXd M(n + m, n + m);
  M << LL, LU, UL, UU;
  return M;
}

MatrixXd hollow_gram(const MatrixXd& X) {
  const Index N = X.rows();
  MatrixXd G = MatrixXd::Zero(N, N);
  G.selfadjointView<Eigen::Lower>().rankUpdate(X);
  G.triangularView<Eigen::StrictlyUpper>() = G.transpose();
  G.diagonal().setZero();
  return G;
}

namespace {

void check_symmetric(const MatrixXd& M) {
  if (M.rows() != M.cols()) throw ParameterError("eigen solver needs a square matrix");
  const double scale = std::max(1.0, M.cwiseAbs().maxCoeff());
  if (M.size() > 0 && (M - M.transpose()).cwiseAbs().maxCoeff() > 1e-10 * scale) {
    throw ParameterError("eigen solver needs a symmetric matrix");
  }
}

// Eigenpairs with ascending 1-based indices [il, iu] via MRRR (dsyevr).
void syevr_range(const MatrixXd& M, int il, int iu, VectorXd& values, MatrixXd& vectors) {
  const int n = static_cast<int>(M.rows());
  MatrixXd work = M;  // dsyevr destroys its input
  const int count = iu - il + 1;
  VectorXd w(n);
  MatrixXd z(n, count);
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(count));
  lapack_int found = 0;
  const lapack_int info =
      LAPACKE_dsyevr(LAPACK_COL_MAJOR, 'V', 'I', 'L', n, work.data(), n, 0.0, 0.0, il, iu, 0.0,
                     &found, w.data(), z.data(), n, isuppz.data());
  if (info != 0 || found != count) {
    std::ostringstream os;
    os << "dsyevr failed (info=" << info << ", found=" << found << ")";
    throw NumericError(os.str());
  }
  values = w.head(count);
  vectors = std::move(z);
}

}  // namespace

std::vector<EigPair> eig_ordered(const MatrixXd& M, std::span<const int> ranks) {
  check_symmetric(M);
  const int n = static_cast<int>(M.rows());
  for (int r : ranks) {
    if (r < 1 || r > n) {
      std::ostringstream os;
      os << "eigen rank " << r << " out of range [1, " << n << "]";
      throw ParameterError(os.str());
    }
  }
  // Ascending index of descending rank r is n - r + 1. Solve each contiguous run once.
  std::vector<int> asc;
  asc.reserve(ranks.size());
  for (int r : ranks) asc.push_back(n - r + 1);
  std::vector<int> sorted = asc;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::vector<EigPair> by_index(static_cast<std::size_t>(n) + 1);
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j + 1 < sorted.size() && sorted[j + 1] == sorted[j] + 1) ++j;
    VectorXd values;
    MatrixXd vectors;
    syevr_range(M, sorted[i], sorted[j], values, vectors);
    for (std::size_t k = i; k <= j; ++k) {
      const Index col = static_cast<Index>(k - i);
      by_index[sorted[k]] = {values(col), vectors.col(col).normalized()};
    }
    i = j + 1;
  }

  std::vector<EigPair> out;
  out.reserve(ranks.size());
  for (int a : asc) out.push_back(by_index[a]);
  return out;
}

VectorXd eigenvalues_descending(const MatrixXd& M) {
  check_symmetric(M);
  const int n = static_cast<int>(M.rows());
  MatrixXd work = M;
  VectorXd w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data());
  if (info != 0) throw NumericError("dsyevd failed");
  return w.reverse();
}

VectorXd ridge_solve(const MatrixXd& H, std::span<const Index> train, const VectorXd& y,
                     double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw ParameterError("ridge_solve requires lambda > 0");
  }
  if (y.size() != H.rows()) throw ParameterError("ridge_solve: y length must match H rows");
  const Index d = H.cols();
  MatrixXd HL(static_cast<Index>(train.size()), d);
  VectorXd yL(static_cast<Index>(train.size()));
  for (std::size_t k = 0; k < train.size(); ++k) {
    const Index i = train[k];
    if (i < 0 || i >= H.rows()) throw ParameterError("ridge_solve: train index out of range");
    HL.row(static_cast<Index>(k)) = H.row(i);
    yL(static_cast<Index>(k)) = y(i);
  }
  MatrixXd normal = MatrixXd::Identity(d, d) * lambda;
  normal.selfadjointView<Eigen::Lower>().rankUpdate(HL.transpose());
  const Eigen::LLT<MatrixXd> llt(normal);
  if (llt.info() != Eigen::Success) throw NumericError("ridge_solve: Cholesky failed");
  return llt.solve(HL.transpose() * yL);
}

std::vector<Index> index_range(Index first, Index count) {
  std::vector<Index> v(static_cast<std::size_t>(count));
  std::iota(v.begin(), v.end(), first);
  return v;
}

}  // namespace csbm
