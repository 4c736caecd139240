#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "csbm/errors.hpp"
#include "csbm/metrics.hpp"
#include "csbm/spectral.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace csbm;

namespace {

// Ten nodes: labeled 0..3 = (+,+,-,-), test 4..9 = (+,+,+,-,-,-). The test block is two
// triangles {4,5,6} and {7,8,9}; every test node links to the two labeled nodes of its
// class; the labeled block holds the edges 0-1 and 2-3. Features are the pure spike.
Dataset handcrafted(bool bridge, double theta = 3.0, int d = 2, bool isolate_last = false) {
  ModelSpec spec{2.0, 1.0, 0.5, 0.4, 10, d, {}};
  ModelParams p = ModelParams::derive(spec);
  p.theta = theta;
  VectorXd y(10);
  y << 1, 1, -1, -1, 1, 1, 1, -1, -1, -1;
  MatrixXd A = MatrixXd::Zero(10, 10);
  auto link = [&](int i, int j) { A(i, j) = A(j, i) = 1; };
  link(0, 1);
  link(2, 3);
  for (int u : {4, 5, 6}) link(u, 0), link(u, 1);
  for (int u : {7, 8, 9}) link(u, 2), link(u, 3);
  link(4, 5), link(5, 6), link(4, 6);
  link(7, 8), link(8, 9), link(7, 9);
  if (bridge) link(6, 7);
  if (isolate_last) {
    A.row(9).setZero();
    A.col(9).setZero();
  }
  VectorXd mu = VectorXd::Zero(d);
  mu(0) = 1.0;
  MatrixXd X = theta * y * mu.transpose();
  return make_dataset(p, A, X, y, mu, 0);
}

// Independent evaluation of the dense estimator with Jacobi eigenpairs.
std::vector<double> dense_oracle(const Dataset& ds, bool* fallback) {
  const int n = ds.n(), m = ds.m(), N = ds.N(), d = ds.d();
  const MatrixXd Ad = dense_adjacency(ds);
  oracle::Mat AU(m, oracle::Vec(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) AU[i][j] = Ad(n + i, n + j);
  std::vector<double> sup(m, 0.0);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < n; ++j) sup[i] += Ad(n + i, j) * ds.y(j);

  const auto G = oracle::hollow_gram(oracle::to_mat(ds.X));
  const auto [gv, gV] = oracle::jacobi_eigen(G);
  oracle::Mat GU(m, oracle::Vec(m));
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) GU[i][j] = G[n + i][n + j];
  const auto [uv, uV] = oracle::jacobi_eigen(GU);
  std::vector<double> gsup(m, 0.0), u1(m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < n; ++j) gsup[i] += G[n + i][j] * ds.y(j);
    u1[i] = uV[i][0];
  }
  if (oracle::dot(u1, gsup) < 0)
    for (double& v : u1) v = -v;
  const double coef = 2 * gv[0] / (N * gv[0] + double(d) * N);
  std::vector<double> out(m);
  for (int i = 0; i < m; ++i) out[i] = coef * (gsup[i] / std::sqrt(m) + uv[0] * u1[i]);

  const auto [av, aV] = oracle::jacobi_eigen(AU);
  const double l1 = av[0], l2 = av[1];
  *fallback = !(l1 - std::abs(l2) > 1e-9);
  if (*fallback) return out;
  const double kappa = std::log((l1 + l2) / (l1 - l2));
  std::vector<double> u2(m);
  for (int i = 0; i < m; ++i) u2[i] = aV[i][1];
  if (l2 * oracle::dot(u2, sup) < 0)
    for (double& v : u2) v = -v;
  for (int i = 0; i < m; ++i) out[i] += kappa * (sup[i] / std::sqrt(m) + l2 * u2[i]);
  return out;
}

Dataset negate_labels(const Dataset& ds) {
  return make_dataset(ds.params, dense_adjacency(ds), ds.X, -ds.y, ds.mu, ds.seed);
}

}  // namespace

TEST(KappaHat, DirectFormula) {
  EXPECT_NEAR(kappa_from_eigenvalues(10, 5), std::log(3.0), 1e-15);
  EXPECT_NEAR(kappa_from_eigenvalues(10, -5), -std::log(3.0), 1e-15);
  EXPECT_EQ(kappa_from_eigenvalues(10, 0), 0.0);
  EXPECT_THROW(kappa_from_eigenvalues(5, 5), DegenerateError);
  EXPECT_THROW(kappa_from_eigenvalues(5, -7), DegenerateError);
}

TEST(KappaHat, SignFollowsRegime) {
  const Dataset homo = sample_csbm(fixture::params(10, 2, 0.5, 400), 1);
  const Dataset het = sample_csbm(fixture::params(2, 10, 0.5, 400), 1);
  const auto AU = [](const Dataset& ds) {
    return MatrixXd(dense_adjacency(ds).bottomRightCorner(ds.m(), ds.m()));
  };
  const KappaHat kh = kappa_hat(AU(homo), true);
  EXPECT_GT(kh.kappa, 0.0);
  EXPECT_EQ(kh.ell, 2);
  const KappaHat kt = kappa_hat(AU(het), false);
  EXPECT_LT(kt.kappa, 0.0);
  EXPECT_EQ(kt.ell, het.m());
  EXPECT_LT(kt.ell_pair.value, 0.0);
}

TEST(HomophilyDetection, BothRegimes) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    EXPECT_TRUE(detect_homophily(sample_csbm(fixture::params(9, 2, 0.5, 800), seed)));
    EXPECT_FALSE(detect_homophily(sample_csbm(fixture::params(2, 9, 0.5, 800), seed)));
  }
}

TEST(PcaDense, HandcraftedTrianglesFallBackToFeatures) {
  const Dataset ds = handcrafted(false);
  bool fallback = false;
  const auto ref = dense_oracle(ds, &fallback);
  ASSERT_TRUE(fallback);  // two disjoint triangles: lambda1 = lambda2 = 2
  const Estimate est = estimate_pca_dense(ds);
  EXPECT_EQ(est.hyper.at("fallback"), 1.0);
  for (int i = 0; i < ds.m(); ++i) EXPECT_NEAR(est.scores(i), ref[i], 1e-9);
  // Closed form: 2*81/(10*81 + 2*10) * (36 + 45)/sqrt(6) * y_u.
  const double expected = 162.0 / 830.0 * 81.0 / std::sqrt(6.0);
  for (int i = 0; i < ds.m(); ++i) EXPECT_NEAR(est.scores(i), expected * ds.y_test()(i), 1e-9);
  EXPECT_TRUE(est.labels == ds.y_test());
}

TEST(PcaDense, HandcraftedBridgedTriangles) {
  const Dataset ds = handcrafted(true);
  bool fallback = true;
  const auto ref = dense_oracle(ds, &fallback);
  ASSERT_FALSE(fallback);
  const Estimate est = estimate_pca_dense(ds);
  EXPECT_EQ(est.hyper.at("fallback"), 0.0);
  EXPECT_EQ(est.hyper.at("homophilic"), 1.0);
  for (int i = 0; i < ds.m(); ++i) EXPECT_NEAR(est.scores(i), ref[i], 1e-9);
  EXPECT_TRUE(est.labels == ds.y_test());
}

TEST(PcaDense, OutputInvariantUnderLabelFlip) {
  const Dataset ds = sample_csbm(fixture::params(8, 2, 0.5, 400), 3);
  const Estimate est = estimate_pca_dense(ds);
  EXPECT_EQ(mismatch(ds.y_test(), est.labels), mismatch(ds.y_test(), -est.labels));
}

TEST(PcaDense, RecoversDeepInsideRegion) {
  const ModelParams p = fixture::params(10, 1.5, 0.5, 800);
  int exact = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Dataset ds = sample_csbm(p, derive_seed(100, 0, seed));
    exact += mismatch(ds.y_test(), estimate_pca_dense(ds).labels) == 0.0;
  }
  EXPECT_GE(exact, 18);
}

TEST(PcaSparse, LabeledEdgeCounts) {
  // n = 12 labeled nodes (6 per class): all 30 within pairs plus 10 cross edges.
  ModelParams p = fixture::params(3, 1, 0.5, 48, 2);
  ASSERT_EQ(p.n, 12);
  Rng rng(1);
  VectorXd y(48);
  y.head(12) << 1, 1, 1, 1, 1, 1, -1, -1, -1, -1, -1, -1;
  y.tail(36) = sample_balanced_labels(36, rng);
  MatrixXd A = MatrixXd::Zero(48, 48);
  int cross = 0;
  for (int i = 0; i < 12; ++i)
    for (int j = i + 1; j < 12; ++j) {
      if (y(i) == y(j)) {
        A(i, j) = A(j, i) = 1;
      } else if (cross < 10) {
        A(i, j) = A(j, i) = 1;
        ++cross;
      }
    }
  VectorXd mu = VectorXd::Unit(2, 0);
  const Dataset ds = make_dataset(p, A, MatrixXd::Zero(48, 2), y, mu);
  const auto st = labeled_edge_stats(ds);
  EXPECT_EQ(st.total, 80.0);
  EXPECT_EQ(st.signed_sum, 40.0);
  EXPECT_NEAR(kappa_tilde_from_counts(st.total, st.signed_sum), std::log(3.0), 1e-15);
}

TEST(PcaSparse, BalancedCountsGiveZeroKappa) {
  EXPECT_EQ(kappa_tilde_from_counts(40, 0), 0.0);
  EXPECT_THROW(kappa_tilde_from_counts(10, 10), DegenerateError);
  EXPECT_THROW(kappa_tilde_from_counts(0, 0), DegenerateError);
}

TEST(PcaSparse, BeatsFeatureOnlyInSparseRegime) {
  ModelSpec spec{8, 1, 0.5, 0.25, 800, 40, QmRule::explicit_value(std::pow(std::log(600.0), 2.0 / 3.0))};
  const ModelParams p = ModelParams::derive(spec);
  double sparse = 0, gmm = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const Dataset ds = sample_csbm(p, derive_seed(7, 0, t));
    sparse += mismatch(ds.y_test(), estimate_pca_sparse(ds).labels);
    gmm += mismatch(ds.y_test(), sign_labels(gmm_scores(ds)));
  }
  EXPECT_LT(sparse, gmm);
}

TEST(PcaSparse, ScoresAreFeaturePlusGraphTerm) {
  const Dataset ds = sample_csbm(fixture::params(8, 2, 0.5, 200), 5);
  const Estimate est = estimate_pca_sparse(ds);
  const VectorXd gmm = gmm_scores(ds);
  const MatrixXd A = dense_adjacency(ds);
  const int n = ds.n(), m = ds.m();
  const auto st = labeled_edge_stats(ds);
  const double kt = std::log((st.total + st.signed_sum) / (st.total - st.signed_sum));
  const VectorXd g = sign_labels(gmm);
  for (int i = 0; i < m; ++i) {
    double s = 0;
    for (int j = 0; j < n; ++j) s += A(n + i, j) * ds.y(j);
    for (int j = 0; j < m; ++j) s += A(n + i, n + j) * g(j);
    EXPECT_NEAR(est.scores(i), kt * s / std::sqrt(m) + gmm(i), 1e-10);
  }
}

TEST(Genie, IsolatedNodePureSignalIsPositive) {
  const Dataset ds = handcrafted(false, 2.0, 10, true);
  std::vector<Index> others;
  for (Index j = 0; j < ds.N(); ++j)
    if (j != 9) others.push_back(j);
  const double w = genie_score(ds, 9, others);
  // Nine other nodes, each contributing theta^2 = 4.
  EXPECT_NEAR(w, 2.0 / (10 + 10 / 4.0) * 4.0 * 9, 1e-12);
  EXPECT_GT(w, 0.0);
}

TEST(Genie, EqualRatesLeaveFeatureTermOnly) {
  const Dataset ds = sample_csbm(fixture::params(3, 3, 0.8, 12, 3), 2);
  std::vector<Index> subset{0, 1, 2, 3, 5, 7};
  const Index u = 9;
  double feat = 0;
  for (Index j : subset) feat += ds.X.row(u).dot(ds.X.row(j)) * ds.y(j);
  const double t2 = ds.params.theta * ds.params.theta;
  EXPECT_NEAR(genie_score(ds, u, subset), ds.y(u) * 2.0 / (12 + 3 / t2) * feat, 1e-12);
}

TEST(Genie, MatchesDoubleLoopTranscription) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Dataset ds = fixture::tiny(seed, 4);
    const MatrixXd A = dense_adjacency(ds);
    const auto& p = ds.params;
    for (Index u = ds.n(); u < ds.N(); ++u) {
      std::vector<Index> subset;
      for (Index j = 0; j < ds.N(); ++j)
        if (j != u && (j + seed) % 3 != 0) subset.push_back(j);
      double graph = 0, feat = 0;
      for (Index j : subset) {
        graph += A(u, j) * ds.y(j);
        double ip = 0;
        for (int k = 0; k < ds.d(); ++k) ip += ds.X(u, k) * ds.X(j, k);
        feat += ip * ds.y(j);
      }
      const double ref = ds.y(u) * (std::log(p.spec.a / p.spec.b) * graph +
                                    2.0 / (ds.N() + ds.d() / (p.theta * p.theta)) * feat);
      EXPECT_NEAR(genie_score(ds, u, subset), ref, 1e-12);
    }
  }
}

TEST(Genie, EstimateUsesAllOtherNodes) {
  const Dataset ds = fixture::tiny(3, 4);
  const Estimate est = estimate_genie(ds);
  for (Index k = 0; k < ds.m(); ++k) {
    const Index u = ds.n() + k;
    std::vector<Index> others;
    for (Index j = 0; j < ds.N(); ++j)
      if (j != u) others.push_back(j);
    EXPECT_NEAR(est.scores(k) * ds.y(u), genie_score(ds, u, others), 1e-12);
  }
}

TEST(Genie, Preconditions) {
  const Dataset ds = fixture::tiny(3, 4);
  std::vector<Index> bad{0, 5};
  EXPECT_THROW(genie_score(ds, 5, bad), ParameterError);
  Dataset flat = ds;
  flat.params.theta = 0.0;
  EXPECT_THROW(estimate_genie(flat), ParameterError);
}

// Properties

TEST(SpectralProperty, SignAnchoringConsistency) {
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const Dataset ds = sample_csbm(fixture::params(7, 2, 0.5, 300), seed);
    const Dataset neg = negate_labels(ds);
    const VectorXd d1 = estimate_pca_dense(ds).scores, d2 = estimate_pca_dense(neg).scores;
    EXPECT_LE((d1 + d2).cwiseAbs().maxCoeff(), 1e-9);
    const VectorXd s1 = estimate_pca_sparse(ds).scores, s2 = estimate_pca_sparse(neg).scores;
    EXPECT_LE((s1 + s2).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(SpectralProperty, MismatchAtMostHalf) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Dataset ds = sample_csbm(fixture::params(3, 3, 0.0, 200), seed);
    for (const Estimate& e : {estimate_pca_dense(ds), estimate_pca_sparse(ds)}) {
      EXPECT_LE(mismatch(ds.y_test(), e.labels), 0.5);
    }
  }
}

TEST(SpectralProperty, AgreesWithGenieAtHighSnr) {
  const ModelParams p = fixture::params(10, 1, 1.5, 800);
  double agreement = 0;
  for (std::uint64_t t = 0; t < 10; ++t) {
    const Dataset ds = sample_csbm(p, derive_seed(3, 0, t));
    const VectorXd pca = estimate_pca_dense(ds).labels;
    const VectorXd genie = estimate_genie(ds).labels;
    agreement += 1.0 - hamming(pca, genie);
  }
  EXPECT_GE(agreement / 10, 0.99);
}

TEST(SpectralProperty, ErdosRenyiIsRandomGuessing) {
  const ModelParams p = fixture::params(5, 5, 0.0, 800);
  double total = 0;
  for (std::uint64_t t = 0; t < 20; ++t) {
    const Dataset ds = sample_csbm(p, derive_seed(4, 0, t));
    total += mismatch(ds.y_test(), estimate_pca_dense(ds).labels);
  }
  const double mean = total / 20;
  EXPECT_GE(mean, 0.4);
  EXPECT_LE(mean, 0.5);
}

TEST(EstimateType, ZeroScoreTieGoesPositive) {
  const Estimate e = Estimate::from_scores((VectorXd(3) << 0.0, -1e-300, 2.0).finished(), Method::Lrr);
  EXPECT_EQ(e.labels(0), 1.0);
  EXPECT_EQ(e.labels(1), -1.0);
  EXPECT_EQ(e.labels(2), 1.0);
}
