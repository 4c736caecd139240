#include "csbm/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "csbm/errors.hpp"

namespace csbm {

double QmRule::evaluate(int m) const {
  if (kind == Kind::Explicit) {
    if (!(value > 0.0) || !std::isfinite(value)) {
      throw ParameterError("explicit q_m must be positive and finite");
    }
    return value;
  }
  if (m < 2) throw ParameterError("q_m = log(m) requires m >= 2");
  return std::log(static_cast<double>(m));
}

double derive_theta_sq(double c_tau, double q_m, int d, int m, double tau) {
  if (!std::isfinite(c_tau) || !std::isfinite(q_m) || !(tau > 0.0 && tau < 1.0)) {
    throw ParameterError("derive_theta_sq: inputs must be finite with 0 < tau < 1");
  }
  if (c_tau < 0.0) throw ParameterError("derive_theta_sq: c_tau must be nonnegative");
  if (c_tau == 0.0) return 0.0;
  const double p = c_tau * q_m;
  const double r = p * (1.0 - tau) * static_cast<double>(d) / static_cast<double>(m);
  // Positive root of x^2 - p x - r = 0; both terms are nonnegative so no cancellation.
  return 0.5 * (p + std::sqrt(p * p + 4.0 * r));
}

double c_tau_from_theta(double theta, double q_m, int d, int m, double tau) {
  const double t2 = theta * theta;
  if (t2 == 0.0) return 0.0;
  return t2 * t2 / (q_m * (t2 + (1.0 - tau) * static_cast<double>(d) / m));
}

std::pair<int, int> split_sizes(int N, double tau) {
  if (N < 4 || N % 2 != 0) throw ParameterError("N must be an even integer >= 4");
  if (!(tau > 0.0 && tau < 1.0)) throw ParameterError("tau must lie in (0, 1)");
  int n = 2 * static_cast<int>(std::lround(tau * N / 2.0));
  n = std::clamp(n, 2, N - 2);
  return {n, N - n};
}

ModelParams ModelParams::derive(const ModelSpec& spec) {
  if (!(spec.a > 0.0) || !(spec.b > 0.0)) throw ParameterError("a and b must be positive");
  if (spec.d < 1) throw ParameterError("feature dimension d must be positive");
  if (!(spec.c_tau >= 0.0) || !std::isfinite(spec.c_tau)) {
    throw ParameterError("c_tau must be nonnegative and finite");
  }
  ModelParams p;
  p.spec = spec;
  std::tie(p.n, p.m) = split_sizes(spec.N, spec.tau);
  p.q_m = spec.q_m_rule.evaluate(p.m);
  p.alpha = spec.a * p.q_m / p.m;
  p.beta = spec.b * p.q_m / p.m;
  if (!(p.alpha > 0.0 && p.alpha < 1.0) || !(p.beta > 0.0 && p.beta < 1.0)) {
    std::ostringstream os;
    os << "edge probabilities out of (0,1): alpha=" << p.alpha << " beta=" << p.beta;
    throw ParameterError(os.str());
  }
  p.a_tau = spec.a / (1.0 - spec.tau);
  p.b_tau = spec.b / (1.0 - spec.tau);
  p.theta = std::sqrt(derive_theta_sq(spec.c_tau, p.q_m, spec.d, p.m, spec.tau));
  return p;
}

VectorXd sample_balanced_labels(int count, Rng& rng) {
  if (count <= 0 || count % 2 != 0) {
    throw ParameterError("balanced labels need a positive even count");
  }
  std::vector<double> v(count, -1.0);
  std::fill(v.begin(), v.begin() + count / 2, 1.0);
  std::shuffle(v.begin(), v.end(), rng);
  return Eigen::Map<VectorXd>(v.data(), count);
}

VectorXd sample_unit_sphere(int d, Rng& rng) {
  std::normal_distribution<double> normal;
  VectorXd v(d);
  double norm = 0.0;
  while (norm == 0.0) {
    for (int i = 0; i < d; ++i) v(i) = normal(rng);
    norm = v.norm();
  }
  return v / norm;
}

void Dataset::validate() const {
  const int N = params.N();
  if (A.rows() != N || A.cols() != N) throw ParameterError("adjacency must be N x N");
  if (X.rows() != N || X.cols() != params.d()) throw ParameterError("X must be N x d");
  if (y.size() != N) throw ParameterError("y must have length N");
  if (mu.size() != params.d()) throw ParameterError("mu must have length d");
  if (std::abs(mu.norm() - 1.0) > 1e-12) throw ParameterError("mu must be a unit vector");
  for (Index i = 0; i < N; ++i) {
    if (y(i) != 1.0 && y(i) != -1.0) throw ParameterError("labels must be +-1");
  }
  if (y_train().sum() != 0.0 || y_test().sum() != 0.0) {
    throw ParameterError("train and test labels must each be balanced");
  }
  const SparseAdjacency At = A.transpose();
  for (Index i = 0; i < N; ++i) {
    for (SparseAdjacency::InnerIterator it(A, i); it; ++it) {
      if (it.col() == i) throw ParameterError("adjacency diagonal must be zero");
      if (it.value() != 1.0) throw ParameterError("adjacency entries must be 0/1");
    }
  }
  SparseAdjacency diff = A - At;
  diff.prune(0.0);
  if (diff.nonZeros() != 0) throw ParameterError("adjacency must be symmetric");
}

Dataset make_dataset(const ModelParams& params, const MatrixXd& dense_adjacency, MatrixXd X,
                     VectorXd y, VectorXd mu, std::uint64_t seed) {
  Dataset ds;
  ds.params = params;
  ds.seed = seed;
  ds.A = dense_adjacency.sparseView();
  ds.A.makeCompressed();
  ds.X = std::move(X);
  ds.y = std::move(y);
  ds.mu = std::move(mu);
  ds.validate();
  return ds;
}

Dataset sample_csbm(const ModelParams& params, Rng& rng) {
  if (!(params.alpha > 0.0 && params.alpha < 1.0) || !(params.beta > 0.0 && params.beta < 1.0)) {
    throw ParameterError("edge probabilities must lie in (0,1)");
  }
  const int N = params.N();
  const int n = params.n;
  const int d = params.d();

  Dataset ds;
  ds.params = params;
  ds.y.resize(N);
  ds.y.head(n) = sample_balanced_labels(n, rng);
  ds.y.tail(params.m) = sample_balanced_labels(params.m, rng);
  ds.mu = sample_unit_sphere(d, rng);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<Eigen::Triplet<double>> edges;
  edges.reserve(static_cast<std::size_t>(
      1.1 * (params.alpha + params.beta) * 0.25 * static_cast<double>(N) * N + 16));
  for (int i = 0; i < N; ++i) {
    for (int j = i + 1; j < N; ++j) {
      const double p = ds.y(i) == ds.y(j) ? params.alpha : params.beta;
      if (unif(rng) < p) {
        edges.emplace_back(i, j, 1.0);
        edges.emplace_back(j, i, 1.0);
      }
    }
  }
  ds.A.resize(N, N);
  ds.A.setFromTriplets(edges.begin(), edges.end());
  ds.A.makeCompressed();

  std::normal_distribution<double> normal;
  ds.X.resize(N, d);
  for (int i = 0; i < N; ++i) {
    for (int k = 0; k < d; ++k) ds.X(i, k) = normal(rng);
  }
  ds.X.noalias() += params.theta * ds.y * ds.mu.transpose();
  return ds;
}

Dataset sample_csbm(const ModelParams& params, std::uint64_t seed) {
  Rng rng = make_rng(seed);
  Dataset ds = sample_csbm(params, rng);
  ds.seed = seed;
  return ds;
}

MatrixXd dense_adjacency(const Dataset& ds) { return MatrixXd(ds.A); }

double average_degree(const Dataset& ds) {
  return ds.A.sum() / static_cast<double>(ds.N());
}

}  // namespace csbm
