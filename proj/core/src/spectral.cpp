#include "csbm/spectral.hpp"

#include <array>
#include <cmath>
#include <sstream>
#include <vector>

#include "csbm/errors.hpp"

namespace csbm {

namespace {

// A_U as a dense m x m matrix.
MatrixXd test_block(const Dataset& ds) {
  const MatrixXd rows = ds.A.bottomRows(ds.m());
  return rows.rightCols(ds.m());
}

// A_UL v (train_block) or A_U v, via the test rows of the sparse adjacency.
VectorXd test_rows_times(const Dataset& ds, const VectorXd& v, bool train_block) {
  VectorXd padded = VectorXd::Zero(ds.N());
  if (train_block) {
    padded.head(ds.n()) = v;
  } else {
    padded.tail(ds.m()) = v;
  }
  return ds.A.bottomRows(ds.m()) * padded;
}

}  // namespace

double kappa_from_eigenvalues(double lambda1, double lambda_l) {
  // Rounding-level gaps count as ties: the log would only amplify solver noise.
  if (!(lambda1 - std::abs(lambda_l) > 1e-12 * std::abs(lambda1))) {
    std::ostringstream os;
    os << "degenerate spectrum: lambda1=" << lambda1 << ", lambda_l=" << lambda_l;
    throw DegenerateError(os.str());
  }
  return std::log((lambda1 + lambda_l) / (lambda1 - lambda_l));
}

KappaHat kappa_hat(const MatrixXd& A_U, bool homophilic) {
  const int m = static_cast<int>(A_U.rows());
  if (m < 2) throw ParameterError("kappa_hat needs at least two test nodes");
  KappaHat out;
  out.ell = homophilic ? 2 : m;
  const std::array<int, 2> ranks{1, out.ell};
  auto pairs = eig_ordered(A_U, ranks);
  out.lambda1 = pairs[0].value;
  out.ell_pair = std::move(pairs[1]);
  out.kappa = kappa_from_eigenvalues(out.lambda1, out.ell_pair.value);
  return out;
}

LabeledEdgeStats labeled_edge_stats(const Dataset& ds) {
  LabeledEdgeStats st;
  const Index n = ds.n();
  for (Index i = 0; i < n; ++i) {
    for (SparseAdjacency::InnerIterator it(ds.A, i); it; ++it) {
      if (it.col() >= n) continue;
      st.total += it.value();
      st.signed_sum += it.value() * ds.y(i) * ds.y(it.col());
    }
  }
  return st;
}

double kappa_tilde_from_counts(double total, double signed_sum) {
  if (!(total > std::abs(signed_sum))) {
    std::ostringstream os;
    os << "degenerate labeled graph: total=" << total << ", signed=" << signed_sum;
    throw DegenerateError(os.str());
  }
  return std::log((total + signed_sum) / (total - signed_sum));
}

bool detect_homophily(const Dataset& ds) {
  const auto st = labeled_edge_stats(ds);
  const double n = ds.n();
  return st.signed_sum + st.total / (n - 1.0) > 0.0;
}

VectorXd gmm_scores(const Dataset& ds) {
  const Index n = ds.n();
  const Index m = ds.m();
  const double N = ds.N();
  const double d = ds.d();

  const MatrixXd G = hollow_gram(ds.X);
  const std::array<int, 1> top{1};
  const double lambda_G = eig_ordered(G, top)[0].value;
  const MatrixXd G_U = G.bottomRightCorner(m, m);
  EigPair u1 = std::move(eig_ordered(G_U, top)[0]);

  // Off-diagonal block, so no diagonal to hollow out.
  const VectorXd sup = ds.X.bottomRows(m) * (ds.X.topRows(n).transpose() * ds.y_train());
  if (u1.vector.dot(sup) < 0.0) u1.vector = -u1.vector;

  const double coef = 2.0 * lambda_G / (N * lambda_G + d * N);
  return coef * (sup / std::sqrt(static_cast<double>(m)) + u1.value * u1.vector);
}

Estimate estimate_pca_dense(const Dataset& ds, const PcaOptions& opts) {
  if (ds.m() < 4) throw ParameterError("estimate_pca_dense needs m >= 4");
  const VectorXd gmm = gmm_scores(ds);
  const bool homophilic = opts.homophilic.value_or(detect_homophily(ds));
  std::map<std::string, double> hyper{{"homophilic", homophilic ? 1.0 : 0.0}};

  const VectorXd sup = test_rows_times(ds, ds.y_train(), true);
  try {
    const KappaHat kh = kappa_hat(test_block(ds), homophilic);
    VectorXd u = kh.ell_pair.vector;
    const double lam = kh.ell_pair.value;
    // The eigen term lam*u must point the same way as the supervised term.
    if (lam * u.dot(sup) < 0.0) u = -u;
    const VectorXd sbm = kh.kappa * (sup / std::sqrt(static_cast<double>(ds.m())) + lam * u);
    hyper["kappa"] = kh.kappa;
    hyper["lambda1"] = kh.lambda1;
    hyper["lambda_ell"] = lam;
    hyper["ell"] = kh.ell;
    hyper["fallback"] = 0.0;
    return Estimate::from_scores(sbm + gmm, Method::PcaDense, std::move(hyper));
  } catch (const DegenerateError& e) {
    hyper["fallback"] = 1.0;
    Estimate est = Estimate::from_scores(gmm, Method::PcaDense, std::move(hyper));
    est.notes.emplace_back(e.what());
    return est;
  }
}

Estimate estimate_pca_sparse(const Dataset& ds, const PcaOptions& /*opts*/) {
  if (ds.m() < 4) throw ParameterError("estimate_pca_sparse needs m >= 4");
  const VectorXd gmm = gmm_scores(ds);
  const auto st = labeled_edge_stats(ds);
  std::map<std::string, double> hyper{{"edges_total", st.total}, {"edges_signed", st.signed_sum}};
  try {
    const double kt = kappa_tilde_from_counts(st.total, st.signed_sum);
    const VectorXd graph =
        test_rows_times(ds, ds.y_train(), true) + test_rows_times(ds, sign_labels(gmm), false);
    hyper["kappa"] = kt;
    hyper["fallback"] = 0.0;
    const VectorXd sbm = kt * graph / std::sqrt(static_cast<double>(ds.m()));
    return Estimate::from_scores(sbm + gmm, Method::PcaSparse, std::move(hyper));
  } catch (const DegenerateError& e) {
    hyper["fallback"] = 1.0;
    Estimate est = Estimate::from_scores(gmm, Method::PcaSparse, std::move(hyper));
    est.notes.emplace_back(e.what());
    return est;
  }
}

namespace {

struct GenieWeights {
  double graph;
  double feature;
};

GenieWeights genie_weights(const ModelParams& p) {
  if (!(p.theta > 0.0)) throw ParameterError("genie score needs theta > 0");
  return {std::log(p.spec.a / p.spec.b),
          2.0 / (static_cast<double>(p.N()) + p.d() / (p.theta * p.theta))};
}

}  // namespace

double genie_score(const Dataset& ds, Index u, std::span<const Index> subset) {
  if (u < 0 || u >= ds.N()) throw ParameterError("genie_score: node out of range");
  const GenieWeights w = genie_weights(ds.params);
  std::vector<char> in(static_cast<std::size_t>(ds.N()), 0);
  for (Index j : subset) {
    if (j < 0 || j >= ds.N()) throw ParameterError("genie_score: subset index out of range");
    if (j == u) throw ParameterError("genie_score: u must not be in the subset");
    in[static_cast<std::size_t>(j)] = 1;
  }
  double graph = 0.0;
  for (SparseAdjacency::InnerIterator it(ds.A, u); it; ++it) {
    if (in[static_cast<std::size_t>(it.col())]) graph += it.value() * ds.y(it.col());
  }
  VectorXd agg = VectorXd::Zero(ds.d());
  for (Index j : subset) agg += ds.y(j) * ds.X.row(j).transpose();
  const double feature = ds.X.row(u).dot(agg);
  return ds.y(u) * (w.graph * graph + w.feature * feature);
}

Estimate estimate_genie(const Dataset& ds) {
  const GenieWeights w = genie_weights(ds.params);
  const Index n = ds.n();
  const Index m = ds.m();
  const VectorXd Ay = ds.A * ds.y;
  const VectorXd Xty = ds.X.transpose() * ds.y;
  VectorXd scores(m);
  for (Index k = 0; k < m; ++k) {
    const Index u = n + k;
    const auto xu = ds.X.row(u);
    const double feature = xu.dot(Xty) - xu.squaredNorm() * ds.y(u);
    scores(k) = w.graph * Ay(u) + w.feature * feature;
  }
  return Estimate::from_scores(std::move(scores), Method::Genie,
                               {{"graph_weight", w.graph}, {"feature_weight", w.feature}});
}

}  // namespace csbm
