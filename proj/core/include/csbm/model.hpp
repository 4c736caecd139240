#pragma once

// Contextual stochastic block model: parameterization and sampling.
//
// Nodes 0..n-1 carry revealed labels (training set), nodes n..N-1 are the test set.
// Edge probabilities are alpha = a*q_m/m within a community and beta = b*q_m/m across;
// features are X = theta * y * mu^T + Z with Z i.i.d. standard normal.

#include <cstdint>
#include <optional>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "csbm/rng.hpp"

namespace csbm {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using SparseAdjacency = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// How the sparsity scale q_m is chosen: ln(m) by default, or a fixed value.
struct QmRule {
  enum class Kind { LogM, Explicit };
  Kind kind = Kind::LogM;
  double value = 0.0;

  static QmRule log_m() { return {}; }
  static QmRule explicit_value(double q) { return {Kind::Explicit, q}; }
  double evaluate(int m) const;
};

/// User-facing inputs of an experiment cell.
struct ModelSpec {
  double a = 0.0;
  double b = 0.0;
  double c_tau = 0.0;
  double tau = 0.25;
  int N = 0;
  int d = 1;
  QmRule q_m_rule{};
};

/// Inputs plus every derived primitive. Built only through derive(), which validates.
struct ModelParams {
  ModelSpec spec;
  int n = 0;
  int m = 0;
  double q_m = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double a_tau = 0.0;
  double b_tau = 0.0;
  double theta = 0.0;

  static ModelParams derive(const ModelSpec& spec);

  int N() const { return spec.N; }
  int d() const { return spec.d; }
  double c_tau() const { return spec.c_tau; }
  double tau() const { return spec.tau; }
};

/// theta^2 solving c_tau = theta^4 / (q_m (theta^2 + (1-tau) d / m)), i.e. the
/// nonnegative root of theta^4 - c q theta^2 - c q (1-tau) d / m = 0.
double derive_theta_sq(double c_tau, double q_m, int d, int m, double tau);

/// c_tau implied by theta through the same relation (0 when theta = 0).
double c_tau_from_theta(double theta, double q_m, int d, int m, double tau);

/// Train/test sizes: n = round(tau N) to the nearest even integer, m = N - n.
std::pair<int, int> split_sizes(int N, double tau);

/// Uniformly random balanced +-1 vector (a shuffled half/half template).
VectorXd sample_balanced_labels(int count, Rng& rng);

/// Uniform point on the unit sphere in R^d (normalized Gaussian).
VectorXd sample_unit_sphere(int d, Rng& rng);

struct Dataset {
  ModelParams params;
  std::uint64_t seed = 0;
  SparseAdjacency A;  // symmetric 0/1, zero diagonal
  MatrixXd X;         // N x d
  VectorXd y;         // +-1, first n entries revealed
  VectorXd mu;        // unit spike direction

  int N() const { return params.N(); }
  int n() const { return params.n; }
  int m() const { return params.m; }
  int d() const { return params.d(); }

  auto y_train() const { return y.head(params.n); }
  auto y_test() const { return y.tail(params.m); }

  /// Throws ParameterError when a structural invariant is violated.
  void validate() const;
};

/// Build a Dataset from explicit pieces (hand-made instances, deserialization).
Dataset make_dataset(const ModelParams& params, const MatrixXd& dense_adjacency,
                     MatrixXd X, VectorXd y, VectorXd mu, std::uint64_t seed = 0);

/// Draw order: y_L, y_U, mu, edges (i<j, row-major), Z.
Dataset sample_csbm(const ModelParams& params, Rng& rng);

/// Seeded convenience overload; the seed is recorded on the Dataset.
Dataset sample_csbm(const ModelParams& params, std::uint64_t seed);

/// Dense copy of the adjacency matrix.
MatrixXd dense_adjacency(const Dataset& ds);

/// Realized average degree D0 = 1^T A 1 / N.
double average_degree(const Dataset& ds);

}  // namespace csbm
