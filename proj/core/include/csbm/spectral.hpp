#pragma once

// Spectral estimators for the test labels.
//
// Dense regime: scores = y_SBM + y_GMM with
//   y_SBM = kappa * (A_UL y_L / sqrt(m) + lambda_l u_l(A_U)),
//   kappa = log((lambda_1 + lambda_l) / (lambda_1 - lambda_l)),  l = 2 (homophilic) or m,
//   y_GMM = 2 lambda_1(G) / (N lambda_1(G) + d N) * (G_UL y_L / sqrt(m) + lambda_1(G_U) u_1(G_U)),
// where G is the hollowed Gram matrix of X.
// Sparse regime: kappa is replaced by the labeled-block edge statistic and the
// eigenvector term by A_U sign(y_GMM).

#include <optional>
#include <span>

#include "csbm/estimate.hpp"
#include "csbm/linalg.hpp"
#include "csbm/model.hpp"

namespace csbm {

/// log((lambda1 + lambda_l) / (lambda1 - lambda_l)). Throws DegenerateError unless
/// lambda1 > |lambda_l| by more than rounding (relative 1e-12).
double kappa_from_eigenvalues(double lambda1, double lambda_l);

struct KappaHat {
  double kappa = 0.0;
  double lambda1 = 0.0;
  int ell = 2;
  EigPair ell_pair;
};

/// kappa for the test-block adjacency; ell = 2 if homophilic else m.
KappaHat kappa_hat(const MatrixXd& A_U, bool homophilic);

/// Edge counts on the labeled block: total = 1^T A_L 1, signed = y_L^T A_L y_L.
struct LabeledEdgeStats {
  double total = 0.0;
  double signed_sum = 0.0;
};
LabeledEdgeStats labeled_edge_stats(const Dataset& ds);

/// log((total + signed) / (total - signed)); DegenerateError unless total > |signed|.
double kappa_tilde_from_counts(double total, double signed_sum);

/// Homophily guess from the labeled block: y_L^T A_L y_L + 1^T A_L 1 / (n - 1) > 0.
/// The left side has zero mean when a = b.
bool detect_homophily(const Dataset& ds);

struct PcaOptions {
  std::optional<bool> homophilic;  // overrides detect_homophily
};

/// y_GMM over the test nodes, sign anchored so <u_1(G_U), G_UL y_L> >= 0.
VectorXd gmm_scores(const Dataset& ds);

Estimate estimate_pca_dense(const Dataset& ds, const PcaOptions& opts = {});
Estimate estimate_pca_sparse(const Dataset& ds, const PcaOptions& opts = {});

/// Oracle statistic for test node u (global index) against the nodes in `subset`,
/// using true labels and model parameters:
///   y_u * (log(a/b) sum_j A_uj y_j + 2/(N + d/theta^2) sum_j <x_u, x_j> y_j).
double genie_score(const Dataset& ds, Index u, std::span<const Index> subset);

/// Genie estimate with subset = all nodes but u; scores are the bracket (without y_u).
Estimate estimate_genie(const Dataset& ds);

}  // namespace csbm
