#pragma once

// Two-layer GCN with a trainable self-loop coefficient s (rho = s q_m):
//
//   X_s = (A + s q_m I) X / (D0 + s q_m)
//   f   = sigma(X_s W) a / sqrt(K)
//   L   = |f_L - y_L|^2 / (2n)
//
// Training follows the two-stage recipe: one gradient step on W with weight
// decay lambda1 = 1/eta1 (identity activation), then a spectral estimate of s.
// The iterative variant continues with tanh and gradient steps on s.

#include <optional>
#include <vector>

#include "csbm/estimate.hpp"
#include "csbm/model.hpp"
#include "csbm/rng.hpp"

namespace csbm {

enum class Activation { Identity, Tanh };

struct GcnState {
  MatrixXd W;      // d x K
  VectorXd a_out;  // K entries of +-1/sqrt(K), frozen
  double s = 0.0;
  int K = 1;
  Activation activation = Activation::Identity;
};

enum class SelfLoopPolicy {
  Trained,   // s from the spectral estimate after the W step
  Optimal,   // oracle 2 c_tau / log(a_tau / b_tau)
  Zero,
  Explicit,  // rho given in TrainConfig::rho
};

struct TrainConfig {
  int K = 0;             // 0: K = N
  double eta1 = 0.0;     // 0: K / sqrt(q_m)
  double lambda1 = 0.0;  // 0: 1 / eta1
  SelfLoopPolicy self_loop = SelfLoopPolicy::Trained;
  double rho = 0.0;
  // Iterative variant only.
  int steps_stage2 = 0;
  double eta_t = 1e-3;
  double lambda_t = 0.0;
};

/// TrainConfig with K, eta1, lambda1 filled in.
TrainConfig resolve(const TrainConfig& cfg, int N, double q_m);

/// X_s. Throws DegenerateError when D0 + s q_m == 0.
MatrixXd convolve(const Dataset& ds, double s, double q_m);

VectorXd gcn_forward(const Dataset& ds, const GcnState& state, double q_m);
double mse_loss(const Dataset& ds, const GcnState& state, double q_m);

/// Analytic gradients of mse_loss.
MatrixXd loss_grad_W(const Dataset& ds, const GcnState& state, double q_m);
double loss_grad_s(const Dataset& ds, const GcnState& state, double q_m);

/// sqrt(K) W ~ N(0,1) entrywise, sqrt(K) a ~ uniform +-1, s = 0.
GcnState init_state(int d, int K, Activation activation, Rng& rng);

/// W - eta1 (grad_W + lambda1 W).
MatrixXd gd_step_W(const Dataset& ds, const GcnState& state, const TrainConfig& cfg,
                   double q_m);

/// Self-loop estimate after the W step:
///   2 (y_L^T X_L w)^2 / (n^2 q_m) / log((1^T A_L 1 + y_L^T A_L y_L) / (1^T A_L 1 - y_L^T A_L y_L)),
/// w = W1 a / |W1 a|. The numerator tracks 2 theta^2 / q_m ~ 2 c_tau and the
/// denominator log(a/b). Zero when W1 a = 0. DegenerateError on a bad log argument.
double estimate_s1(const Dataset& ds, const MatrixXd& W1, const VectorXd& a_out, double q_m);

/// Unnormalized variant on the full graph:
///   (2 / (n^2 q_m)) y_L^T X_L W1 a / log((1^T A 1 + y_L^T A_L y_L) / (1^T A 1 - y_L^T A_L y_L)).
/// Kept for reference; it does not concentrate on the optimal self-loop.
double s1_printed(const Dataset& ds, const MatrixXd& W1, const VectorXd& a_out, double q_m);
double s1_printed_from(double numerator, double total_edges, double signed_edges, int n,
                       double q_m);

struct GcnRun {
  Estimate estimate;
  GcnState state;  // the state used for prediction
  double s1 = 0.0;  // spectral estimate (NaN if degenerate); final s for the iterative variant
  std::vector<double> loss_history;  // iterative variant: loss before each stage-2 step and at the end
};

GcnRun train_gcn(const Dataset& ds, const TrainConfig& cfg, double q_m, Rng& rng);
/// Same pipeline from a given initialization (W, a_out, K taken from `init`).
GcnRun train_gcn(const Dataset& ds, const TrainConfig& cfg, double q_m, const GcnState& init);

/// Stage 1 as train_gcn but from s ~ U[-1, 1]; stage 2 collapses to K = 1
/// (W <- W1 a, a <- 1), switches to tanh and runs steps_stage2 updates
/// s <- s - eta_t grad_s + lambda_t s. A step that would make D0 + s q_m <= 0 is
/// rejected and eta_t halved.
GcnRun train_gcn_iterative(const Dataset& ds, const TrainConfig& cfg, double q_m, Rng& rng);

}  // namespace csbm
