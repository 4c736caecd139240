#include <gtest/gtest.h>

#include <algorithm>
#include <array>
#include <numeric>
#include <random>

#include "csbm/errors.hpp"
#include "csbm/linalg.hpp"
#include "oracles.hpp"

using namespace csbm;

namespace {

MatrixXd random_symmetric(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) M(i, j) = M(j, i) = g(rng);
  return M;
}

MatrixXd random_matrix(int r, int c, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  MatrixXd M(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) M(i, j) = g(rng);
  return M;
}

double residual(const MatrixXd& M, const EigPair& p) {
  return (M * p.vector - p.value * p.vector).norm();
}

}  // namespace

TEST(HollowGram, IdentityRowsGiveZero) {
  EXPECT_TRUE(hollow_gram(MatrixXd::Identity(5, 5)).isZero(0.0));
}

TEST(HollowGram, TwoIdenticalUnitRows) {
  MatrixXd X(2, 3);
  X << 0.6, 0.8, 0, 0.6, 0.8, 0;
  const MatrixXd G = hollow_gram(X);
  EXPECT_EQ(G(0, 0), 0.0);
  EXPECT_EQ(G(1, 1), 0.0);
  EXPECT_NEAR(G(0, 1), 1.0, 1e-15);
  EXPECT_EQ(G(0, 1), G(1, 0));
}

TEST(HollowGram, MatchesTripleLoop) {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const int N = 2 + trial % 11, d = 1 + trial % 5;
    const MatrixXd X = random_matrix(N, d, rng);
    const MatrixXd G = hollow_gram(X);
    const auto ref = oracle::hollow_gram(oracle::to_mat(X));
    for (int i = 0; i < N; ++i)
      for (int j = 0; j < N; ++j) EXPECT_NEAR(G(i, j), ref[i][j], 1e-12);
    EXPECT_TRUE(G == G.transpose());
  }
}

TEST(BlockView, ReassemblesExactly) {
  std::mt19937_64 rng(2);
  const MatrixXd M = random_matrix(9, 9, rng);
  const BlockView bv = BlockView::split(M, 4);
  EXPECT_EQ(bv.LL.rows(), 4);
  EXPECT_EQ(bv.UU.rows(), 5);
  EXPECT_TRUE(bv.reassemble() == M);
}

TEST(EigOrdered, Diagonal) {
  const MatrixXd M = VectorXd((VectorXd(3) << 3, 1, -2).finished()).asDiagonal();
  const std::array<int, 2> ranks{1, 3};
  const auto pairs = eig_ordered(M, ranks);
  EXPECT_NEAR(pairs[0].value, 3, 1e-14);
  EXPECT_NEAR(pairs[1].value, -2, 1e-14);
  EXPECT_NEAR(std::abs(pairs[0].vector(0)), 1.0, 1e-14);
  EXPECT_NEAR(std::abs(pairs[1].vector(2)), 1.0, 1e-14);
}

TEST(EigOrdered, TwoByTwoSwap) {
  MatrixXd M(2, 2);
  M << 0, 1, 1, 0;
  const std::array<int, 2> ranks{1, 2};
  const auto pairs = eig_ordered(M, ranks);
  EXPECT_NEAR(pairs[0].value, 1, 1e-14);
  EXPECT_NEAR(pairs[1].value, -1, 1e-14);
}

TEST(EigOrdered, MatchesInertiaBisection) {
  std::mt19937_64 rng(3);
  const MatrixXd M = random_symmetric(8, rng);
  const auto ref = oracle::to_mat(M);
  for (int r = 1; r <= 8; ++r) {
    const std::array<int, 1> rank{r};
    EXPECT_NEAR(eig_ordered(M, rank)[0].value, oracle::eigenvalue_by_bisection(ref, r), 1e-8);
  }
}

TEST(EigOrdered, ResultsFollowRequestOrder) {
  std::mt19937_64 rng(4);
  const MatrixXd M = random_symmetric(10, rng);
  const std::array<int, 4> ranks{10, 1, 2, 9};
  const auto pairs = eig_ordered(M, ranks);
  const VectorXd all = eigenvalues_descending(M);
  for (std::size_t k = 0; k < ranks.size(); ++k) {
    EXPECT_NEAR(pairs[k].value, all(ranks[k] - 1), 1e-10);
  }
}

TEST(EigOrdered, Errors) {
  const MatrixXd M = MatrixXd::Identity(3, 3);
  const std::array<int, 1> zero{0}, four{4};
  EXPECT_THROW(eig_ordered(M, zero), ParameterError);
  EXPECT_THROW(eig_ordered(M, four), ParameterError);
  MatrixXd asym = M;
  asym(0, 1) = 1e-3;
  const std::array<int, 1> one{1};
  EXPECT_THROW(eig_ordered(asym, one), ParameterError);
}

TEST(EigOrdered, PermutationInvariance) {
  std::mt19937_64 rng(5);
  const MatrixXd M = random_symmetric(12, rng);
  std::vector<int> perm(12);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  Eigen::PermutationMatrix<Eigen::Dynamic> P(12);
  for (int i = 0; i < 12; ++i) P.indices()(i) = perm[i];
  const MatrixXd Q = P * M * P.transpose();
  EXPECT_TRUE(eigenvalues_descending(M).isApprox(eigenvalues_descending(Q), 1e-9));
  EXPECT_NEAR((eigenvalues_descending(M) - eigenvalues_descending(Q)).cwiseAbs().maxCoeff(), 0.0,
              1e-9);
}

TEST(EigOrdered, TraceEqualsEigenvalueSum) {
  std::mt19937_64 rng(6);
  for (int n : {3, 17, 40}) {
    const MatrixXd M = random_symmetric(n, rng);
    EXPECT_NEAR(eigenvalues_descending(M).sum(), M.trace(), 1e-8 * M.norm());
  }
}

TEST(EigOrdered, ResidualContractAndUnitNorm) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 50;
    const MatrixXd M = random_symmetric(n, rng);
    const std::array<int, 3> ranks{1, std::min(2, n), n};
    for (const auto& p : eig_ordered(M, ranks)) {
      EXPECT_NEAR(p.vector.norm(), 1.0, 1e-10);
      EXPECT_LE(residual(M, p), 1e-8 * (1 + M.norm()));
    }
  }
}

TEST(RidgeSolve, IdentityDesign) {
  const VectorXd y = VectorXd::LinSpaced(4, -1, 2);
  const auto all = index_range(0, 4);
  EXPECT_TRUE(ridge_solve(MatrixXd::Identity(4, 4), all, y, 1.0).isApprox(y / 2, 1e-15));
}

TEST(RidgeSolve, HugePenaltyShrinksToZero) {
  std::mt19937_64 rng(8);
  const MatrixXd H = random_matrix(12, 4, rng);
  const VectorXd y = random_matrix(12, 1, rng);
  const auto train = index_range(0, 8);
  const VectorXd beta = ridge_solve(H, train, y, 1e9);
  const VectorXd rhs = H.topRows(8).transpose() * y.head(8);
  EXPECT_LE(beta.norm(), rhs.norm() / 1e9 * (1 + 1e-9));
}

TEST(RidgeSolve, MatchesGaussianEliminationOracle) {
  std::mt19937_64 rng(9);
  const MatrixXd H = random_matrix(12, 4, rng);
  const VectorXd y = random_matrix(12, 1, rng);
  const std::vector<Index> train{0, 2, 3, 5, 7, 8, 11};
  const double lambda = 0.3;
  oracle::Mat normal(4, oracle::Vec(4, 0.0));
  oracle::Vec rhs(4, 0.0);
  for (Index i : train)
    for (int a = 0; a < 4; ++a) {
      rhs[a] += H(i, a) * y(i);
      for (int b = 0; b < 4; ++b) normal[a][b] += H(i, a) * H(i, b);
    }
  for (int a = 0; a < 4; ++a) normal[a][a] += lambda;
  const auto ref = oracle::solve(normal, rhs);
  const VectorXd beta = ridge_solve(H, train, y, lambda);
  for (int a = 0; a < 4; ++a) EXPECT_NEAR(beta(a), ref[a], 1e-9);
}

TEST(RidgeSolve, StationarityResidual) {
  std::mt19937_64 rng(10);
  const MatrixXd H = random_matrix(50, 6, rng);
  const VectorXd y = random_matrix(50, 1, rng);
  const auto train = index_range(0, 30);
  const VectorXd beta = ridge_solve(H, train, y, 0.05);
  const MatrixXd HL = H.topRows(30);
  const VectorXd rhs = HL.transpose() * y.head(30);
  const VectorXd res = (HL.transpose() * HL + 0.05 * MatrixXd::Identity(6, 6)) * beta - rhs;
  EXPECT_LE(res.norm(), 1e-8 * (rhs.norm() + 1));
}

TEST(RidgeSolve, ScaleInvariance) {
  std::mt19937_64 rng(11);
  const MatrixXd H = random_matrix(20, 5, rng);
  const VectorXd y = random_matrix(20, 1, rng);
  const auto train = index_range(0, 15);
  const VectorXd b1 = ridge_solve(H, train, y, 0.7);
  const VectorXd b2 = ridge_solve(2 * H, train, 2 * y, 4 * 0.7);
  EXPECT_LE((b1 - b2).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(RidgeSolve, RejectsNonPositiveLambda) {
  const auto all = index_range(0, 2);
  EXPECT_THROW(ridge_solve(MatrixXd::Identity(2, 2), all, VectorXd::Ones(2), 0.0), ParameterError);
  EXPECT_THROW(ridge_solve(MatrixXd::Identity(2, 2), all, VectorXd::Ones(2), -1.0), ParameterError);
}
