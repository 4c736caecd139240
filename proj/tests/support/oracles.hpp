#pragma once

// Brute-force reference implementations used by the tests. They share no code with
// the library: plain loops over std::vector-backed copies, textbook algorithms.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Mat = std::vector<std::vector<double>>;
using Vec = std::vector<double>;

inline Mat to_mat(const Eigen::MatrixXd& M) {
  Mat out(static_cast<std::size_t>(M.rows()), Vec(static_cast<std::size_t>(M.cols())));
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j) out[i][j] = M(i, j);
  return out;
}

inline Vec to_vec(const Eigen::VectorXd& v) { return Vec(v.data(), v.data() + v.size()); }

// G_ij = sum_k X_ik X_jk for i != j, zero diagonal.
inline Mat hollow_gram(const Mat& X) {
  const std::size_t N = X.size();
  Mat G(N, Vec(N, 0.0));
  for (std::size_t i = 0; i < N; ++i)
    for (std::size_t j = 0; j < N; ++j) {
      if (i == j) continue;
      double s = 0.0;
      for (std::size_t k = 0; k < X[i].size(); ++k) s += X[i][k] * X[j][k];
      G[i][j] = s;
    }
  return G;
}

// Number of eigenvalues of symmetric M strictly below sigma: count of negative pivots in
// the LDL^T factorization of M - sigma I (Sylvester's law of inertia).
inline int count_below(const Mat& M, double sigma) {
  const std::size_t n = M.size();
  Mat A = M;
  for (std::size_t i = 0; i < n; ++i) A[i][i] -= sigma;
  int negative = 0;
  for (std::size_t k = 0; k < n; ++k) {
    double piv = A[k][k];
    if (piv == 0.0) piv = 1e-300;
    if (piv < 0.0) ++negative;
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = A[i][k] / piv;
      if (f == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) A[i][j] -= f * A[k][j];
    }
  }
  return negative;
}

// rank-th largest eigenvalue (rank 1 = largest) by bisection on the inertia count.
inline double eigenvalue_by_bisection(const Mat& M, int rank) {
  const int n = static_cast<int>(M.size());
  double radius = 0.0;
  for (const auto& row : M) {
    double r = 0.0;
    for (double v : row) r += std::abs(v);
    radius = std::max(radius, r);
  }
  double lo = -radius - 1.0;
  double hi = radius + 1.0;
  // Want x with count_below(x) = n - rank at lambda_(rank).
  const int target = n - rank + 1;
  for (int it = 0; it < 200 && hi - lo > 1e-13 * (1.0 + radius); ++it) {
    const double mid = 0.5 * (lo + hi);
    if (count_below(M, mid) >= target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Gaussian elimination with partial pivoting.
inline Vec solve(Mat A, Vec b) {
  const std::size_t n = A.size();
  for (std::size_t k = 0; k < n; ++k) {
    std::size_t p = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(A[i][k]) > std::abs(A[p][k])) p = i;
    if (A[p][k] == 0.0) throw std::runtime_error("singular system");
    std::swap(A[k], A[p]);
    std::swap(b[k], b[p]);
    for (std::size_t i = k + 1; i < n; ++i) {
      const double f = A[i][k] / A[k][k];
      for (std::size_t j = k; j < n; ++j) A[i][j] -= f * A[k][j];
      b[i] -= f * b[k];
    }
  }
  Vec x(n);
  for (std::size_t i = n; i-- > 0;) {
    double s = b[i];
    for (std::size_t j = i + 1; j < n; ++j) s -= A[i][j] * x[j];
    x[i] = s / A[i][i];
  }
  return x;
}

// Cyclic Jacobi rotations; returns eigenvalues descending with matching column vectors.
inline std::pair<Vec, Mat> jacobi_eigen(Mat A) {
  const std::size_t n = A.size();
  Mat V(n, Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) V[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += A[p][q] * A[p][q];
    if (off < 1e-30) break;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        if (std::abs(A[p][q]) < 1e-300) continue;
        const double theta = (A[q][q] - A[p][p]) / (2.0 * A[p][q]);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t k = 0; k < n; ++k) {
          const double akp = A[k][p], akq = A[k][q];
          A[k][p] = c * akp - s * akq;
          A[k][q] = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = A[p][k], aqk = A[q][k];
          A[p][k] = c * apk - s * aqk;
          A[q][k] = s * apk + c * aqk;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = V[k][p], vkq = V[k][q];
          V[k][p] = c * vkp - s * vkq;
          V[k][q] = s * vkp + c * vkq;
        }
      }
  }
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](auto x, auto y) { return A[x][x] > A[y][y]; });
  Vec vals(n);
  Mat vecs(n, Vec(n));
  for (std::size_t k = 0; k < n; ++k) {
    vals[k] = A[order[k]][order[k]];
    for (std::size_t i = 0; i < n; ++i) vecs[i][k] = V[i][order[k]];
  }
  return {vals, vecs};
}

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace oracle
