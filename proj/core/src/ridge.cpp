#include "csbm/ridge.hpp"

#include <cmath>
#include <sstream>

#include "csbm/errors.hpp"
#include "csbm/linalg.hpp"

namespace csbm {

MatrixXd graph_conv(const SparseAdjacency& A, const MatrixXd& X, double rho, double q_m) {
  if (A.rows() != X.rows()) throw ParameterError("graph_conv: A and X disagree on N");
  if (!(q_m > 0.0)) throw ParameterError("graph_conv: q_m must be positive");
  const double N = static_cast<double>(A.rows());
  const double D0 = A.sum() / N;
  const double deg = D0 + rho;
  if (deg == 0.0) {
    std::ostringstream os;
    os << "graph_conv: degenerate normalization (D0 + rho = 0, rho=" << rho << ")";
    throw DegenerateError(os.str());
  }
  MatrixXd h = A * X;
  h += rho * X;
  h /= deg * std::sqrt(N * q_m);
  return h;
}

MatrixXd graph_conv(const Dataset& ds, double rho, double q_m) {
  return graph_conv(ds.A, ds.X, rho, q_m);
}

RidgePrediction fit_lrr(const Dataset& ds, const ConvConfig& config) {
  if (!(config.lambda > 0.0)) throw ParameterError("fit_lrr: lambda must be positive");
  const MatrixXd h = graph_conv(ds, config.rho, ds.params.q_m);
  const Index n = ds.n();
  const Index m = ds.m();
  const auto train = index_range(0, n);

  RidgePrediction out;
  out.beta = ridge_solve(h, train, ds.y, config.lambda);
  const VectorXd fitted = h * out.beta;
  out.train_mse = (fitted.head(n) - ds.y_train()).squaredNorm() / static_cast<double>(n);
  out.test_mse = (fitted.tail(m) - ds.y_test()).squaredNorm() / static_cast<double>(m);
  out.estimate = Estimate::from_scores(fitted.tail(m), Method::Lrr,
                                       {{"rho", config.rho}, {"lambda", config.lambda}});
  return out;
}

double optimal_s(double a_tau, double b_tau, double c_tau) {
  if (!(a_tau > 0.0 && b_tau > 0.0)) throw ParameterError("optimal_s: a_tau, b_tau must be positive");
  if (a_tau == b_tau) throw ParameterError("optimal self-loop undefined when a_tau == b_tau");
  return 2.0 * c_tau / std::log(a_tau / b_tau);
}

double optimal_rho(double a_tau, double b_tau, double c_tau, double q_m) {
  return optimal_s(a_tau, b_tau, c_tau) * q_m;
}

KappaZeta kappa_zeta(double a_tau, double b_tau, double c_tau, double s, double tau,
                     double lambda) {
  const double denom = a_tau + b_tau + 2.0 * s;
  if (denom == 0.0) throw ParameterError("kappa_zeta: a_tau + b_tau + 2s is zero");
  if (!(lambda > 0.0)) throw ParameterError("kappa_zeta: lambda must be positive");
  KappaZeta kz;
  kz.kappa = std::sqrt(c_tau) * (a_tau - b_tau + 2.0 * s) / denom;
  kz.zeta = kz.kappa * tau / (kz.kappa * kz.kappa * tau + lambda);
  return kz;
}

double asymptotic_risk(double kappa, double tau, double lambda) {
  if (!(lambda > 0.0)) throw ParameterError("asymptotic_risk: lambda must be positive");
  const double den = kappa * kappa * tau + lambda;
  return lambda * lambda / (den * den);
}

double expected_average_degree(const ModelParams& p) {
  const double half = p.N() / 2.0;
  return p.alpha * (half - 1.0) + p.beta * half;
}

}  // namespace csbm
