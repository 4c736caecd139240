#pragma once

// Linear ridge regression on a self-looped graph convolution.
//
//   h(X) = (A + rho I) X / ((D0 + rho) sqrt(N q_m)),   D0 = 1^T A 1 / N
//   beta = (h_L^T h_L + lambda I)^{-1} h_L^T y_L
//
// Test scores are the test rows of h beta.

#include "csbm/estimate.hpp"
#include "csbm/model.hpp"

namespace csbm {

struct ConvConfig {
  double rho = 0.0;     // self-loop weight, rho = s * q_m
  double lambda = 0.1;  // ridge penalty, must be positive
};

/// Throws DegenerateError when D0 + rho == 0.
MatrixXd graph_conv(const SparseAdjacency& A, const MatrixXd& X, double rho, double q_m);
MatrixXd graph_conv(const Dataset& ds, double rho, double q_m);

struct RidgePrediction {
  VectorXd beta;
  Estimate estimate;
  double train_mse = 0.0;  // (1/n) |h_L beta - y_L|^2
  double test_mse = 0.0;   // (1/m) |h_U beta - y_U|^2
};

/// Uses the dataset's q_m.
RidgePrediction fit_lrr(const Dataset& ds, const ConvConfig& config);

/// s = 2 c_tau / log(a_tau / b_tau). Throws ParameterError when a_tau == b_tau.
double optimal_s(double a_tau, double b_tau, double c_tau);
double optimal_rho(double a_tau, double b_tau, double c_tau, double q_m);

struct KappaZeta {
  double kappa = 0.0;
  double zeta = 0.0;
};

/// kappa = sqrt(c) (a - b + 2s) / (a + b + 2s),  zeta = kappa tau / (kappa^2 tau + lambda).
KappaZeta kappa_zeta(double a_tau, double b_tau, double c_tau, double s, double tau,
                     double lambda);

/// Limit of both risks: lambda^2 / (kappa^2 tau + lambda)^2.
double asymptotic_risk(double kappa, double tau, double lambda);

/// Expected average degree of the sampled graph,
/// (alpha (N/2 - 1) + beta N/2), for comparison with the realized D0.
double expected_average_degree(const ModelParams& p);

}  // namespace csbm
