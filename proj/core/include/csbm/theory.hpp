#pragma once

// Large-deviation rate functions and exact-recovery boundaries.
//
//   I(a, b, c)        = ((sqrt a - sqrt b)^2 + c) / 2
//   I(t; a, b, c)     = (a - a (a/b)^t + b - b (b/a)^t) / 2 - 2 c (t + t^2),  sup at t = -1/2
//   g(t; a, b, c, z, s) = g1 + g2 with D = a + b + 2s,
//     g1 = -2 t s z sqrt(c) / D - 2 t^2 s^2 z^2 / D^2
//     g2 = -(a/2)(exp(2 t z sqrt(c) / D) - 1) - (b/2)(exp(-2 t z sqrt(c) / D) - 1)
//   J = sup_t g, which equals I only at s = 2c / log(a/b).

#include <functional>
#include <map>
#include <optional>
#include <utility>

#include "csbm/model.hpp"

namespace csbm {

double rate_I(double a_tau, double b_tau, double c_tau);
double rate_I_t(double t, double a_tau, double b_tau, double c_tau);
double rate_g(double t, double a_tau, double b_tau, double c_tau, double zeta, double s);

struct SupResult {
  double value = 0.0;
  double argmax = 0.0;
  bool clamped = false;  // an exponent argument hit the +-700 guard
};

/// Maximum of a concave-on-its-bracket function: 64-point scan of [lo, hi], widened by
/// doubling while the best point sits on the edge (up to |t| <= max_abs, else NumericError),
/// then golden-section refinement down to a 1e-10 interval.
SupResult sup_1d(const std::function<double(double)>& f, double lo = -8.0, double hi = 8.0,
                 double max_abs = 1e6);

SupResult sup_rate_I_t(double a_tau, double b_tau, double c_tau);
SupResult sup_rate_g(double a_tau, double b_tau, double c_tau, double zeta, double s);
double rate_J(double a_tau, double b_tau, double c_tau, double zeta, double s);

/// The two values x with rate_I(x, other, c_tau) == target_I:
/// (sqrt(other) +- sqrt(2 target - c))^2, larger first. ParameterError when target < c/2.
std::pair<double, double> boundary_solve(double other, double c_tau, double target_I);

/// Feature SNR of the unsupervised problem on the test block,
/// c0 = theta^4 / (q_m (theta^2 + d/m)).
double unsupervised_c0(double theta, double q_m, int d, int m);

struct TheoryPoint {
  double a_tau = 0.0;
  double b_tau = 0.0;
  double c_tau = 0.0;
  double I = 0.0;
  double I_unsup = 0.0;
  std::optional<double> s_opt;
  std::map<double, double> J_at;
  double kappa = 0.0;
  double zeta = 0.0;
  double risk_limit = 0.0;
};

/// Summary for a parameter cell. kappa/zeta/risk use s_opt (0 if undefined) and lambda.
/// J is evaluated at every s in `s_values` with a positive a_tau + b_tau + 2s.
TheoryPoint theory_point(const ModelParams& p, double lambda,
                         const std::vector<double>& s_values = {});

}  // namespace csbm
