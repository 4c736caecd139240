#include "csbm/gcn.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "csbm/errors.hpp"
#include "csbm/ridge.hpp"
#include "csbm/spectral.hpp"

namespace csbm {

namespace {

double realized_degree(const Dataset& ds) { return ds.A.sum() / static_cast<double>(ds.N()); }

double normalizer(const Dataset& ds, double s, double q_m) {
  const double deg = realized_degree(ds) + s * q_m;
  if (deg == 0.0) {
    std::ostringstream os;
    os << "degenerate GCN normalization at s=" << s;
    throw DegenerateError(os.str());
  }
  return deg;
}

MatrixXd activate(const MatrixXd& Z, Activation act) {
  if (act == Activation::Identity) return Z;
  return Z.array().tanh().matrix();
}

MatrixXd activate_prime(const MatrixXd& Z, Activation act) {
  if (act == Activation::Identity) return MatrixXd::Ones(Z.rows(), Z.cols());
  return (1.0 - Z.array().tanh().square()).matrix();
}

void check_state(const Dataset& ds, const GcnState& st) {
  if (st.W.rows() != ds.d() || st.W.cols() != st.K || st.a_out.size() != st.K) {
    throw ParameterError("GCN state shapes do not match (W must be d x K, a_out length K)");
  }
}

// Train-row residual f_L - y_L together with the pre-activation on the train rows.
struct TrainPass {
  MatrixXd Xs;
  MatrixXd Z_L;
  VectorXd r;
};

TrainPass train_pass(const Dataset& ds, const GcnState& st, double q_m) {
  check_state(ds, st);
  TrainPass p;
  p.Xs = convolve(ds, st.s, q_m);
  const Index n = ds.n();
  p.Z_L = p.Xs.topRows(n) * st.W;
  const double rootK = std::sqrt(static_cast<double>(st.K));
  p.r = activate(p.Z_L, st.activation) * st.a_out / rootK - ds.y_train();
  return p;
}

}  // namespace

TrainConfig resolve(const TrainConfig& cfg, int N, double q_m) {
  TrainConfig out = cfg;
  if (out.K <= 0) out.K = N;
  if (out.eta1 <= 0.0) out.eta1 = out.K / std::sqrt(q_m);
  if (out.lambda1 <= 0.0) out.lambda1 = 1.0 / out.eta1;
  return out;
}

MatrixXd convolve(const Dataset& ds, double s, double q_m) {
  const double deg = normalizer(ds, s, q_m);
  MatrixXd Xs = ds.A * ds.X;
  Xs += (s * q_m) * ds.X;
  Xs /= deg;
  return Xs;
}

VectorXd gcn_forward(const Dataset& ds, const GcnState& state, double q_m) {
  check_state(ds, state);
  const MatrixXd Xs = convolve(ds, state.s, q_m);
  const double rootK = std::sqrt(static_cast<double>(state.K));
  if (state.activation == Activation::Identity) return Xs * (state.W * state.a_out) / rootK;
  return activate(Xs * state.W, state.activation) * state.a_out / rootK;
}

double mse_loss(const Dataset& ds, const GcnState& state, double q_m) {
  const VectorXd f = gcn_forward(ds, state, q_m);
  return (f.head(ds.n()) - ds.y_train()).squaredNorm() / (2.0 * ds.n());
}

MatrixXd loss_grad_W(const Dataset& ds, const GcnState& state, double q_m) {
  const TrainPass p = train_pass(ds, state, q_m);
  const double scale = 1.0 / (ds.n() * std::sqrt(static_cast<double>(state.K)));
  const auto XL = p.Xs.topRows(ds.n());
  if (state.activation == Activation::Identity) {
    return scale * (XL.transpose() * p.r) * state.a_out.transpose();
  }
  const MatrixXd M =
      ((p.r * state.a_out.transpose()).array() * activate_prime(p.Z_L, state.activation).array())
          .matrix();
  return scale * XL.transpose() * M;
}

double loss_grad_s(const Dataset& ds, const GcnState& state, double q_m) {
  const TrainPass p = train_pass(ds, state, q_m);
  const Index n = ds.n();
  const double deg = normalizer(ds, state.s, q_m);
  // d X_s / ds = q_m (X - X_s) / (D0 + s q_m)
  const MatrixXd dXs_L = q_m * (ds.X.topRows(n) - p.Xs.topRows(n)) / deg;
  const MatrixXd dZ_L = dXs_L * state.W;
  const MatrixXd dAct = (activate_prime(p.Z_L, state.activation).array() * dZ_L.array()).matrix();
  const VectorXd df = dAct * state.a_out / std::sqrt(static_cast<double>(state.K));
  return p.r.dot(df) / static_cast<double>(n);
}

GcnState init_state(int d, int K, Activation activation, Rng& rng) {
  if (d < 1 || K < 1) throw ParameterError("init_state: d and K must be positive");
  GcnState st;
  st.K = K;
  st.activation = activation;
  st.s = 0.0;
  const double rootK = std::sqrt(static_cast<double>(K));
  std::normal_distribution<double> normal(0.0, 1.0);
  st.W.resize(d, K);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < K; ++j) st.W(i, j) = normal(rng) / rootK;
  }
  std::bernoulli_distribution coin(0.5);
  st.a_out.resize(K);
  for (int j = 0; j < K; ++j) st.a_out(j) = (coin(rng) ? 1.0 : -1.0) / rootK;
  return st;
}

MatrixXd gd_step_W(const Dataset& ds, const GcnState& state, const TrainConfig& cfg,
                   double q_m) {
  if (!(cfg.eta1 > 0.0)) throw ParameterError("gd_step_W: eta1 must be positive");
  return state.W - cfg.eta1 * (loss_grad_W(ds, state, q_m) + cfg.lambda1 * state.W);
}

double estimate_s1(const Dataset& ds, const MatrixXd& W1, const VectorXd& a_out, double q_m) {
  const VectorXd v = W1 * a_out;
  const double norm = v.norm();
  if (norm == 0.0) return 0.0;
  const Index n = ds.n();
  const double proj = ds.y_train().dot(ds.X.topRows(n) * (v / norm));
  const double numer = 2.0 * proj * proj / (static_cast<double>(n) * n * q_m);
  const auto st = labeled_edge_stats(ds);
  const double kt = kappa_tilde_from_counts(st.total, st.signed_sum);
  if (kt == 0.0) throw DegenerateError("estimate_s1: labeled graph carries no signal");
  return numer / kt;
}

double s1_printed_from(double numerator, double total_edges, double signed_edges, int n,
                       double q_m) {
  const double scaled = 2.0 * numerator / (static_cast<double>(n) * n * q_m);
  if (scaled == 0.0) return 0.0;
  const double k = kappa_tilde_from_counts(total_edges, signed_edges);
  if (k == 0.0) throw DegenerateError("s1: log term vanishes");
  return scaled / k;
}

double s1_printed(const Dataset& ds, const MatrixXd& W1, const VectorXd& a_out, double q_m) {
  const Index n = ds.n();
  const double numer = ds.y_train().dot(ds.X.topRows(n) * (W1 * a_out));
  return s1_printed_from(numer, ds.A.sum(), labeled_edge_stats(ds).signed_sum, ds.n(), q_m);
}

GcnRun train_gcn(const Dataset& ds, const TrainConfig& cfg_in, double q_m, Rng& rng) {
  const TrainConfig cfg = resolve(cfg_in, ds.N(), q_m);
  return train_gcn(ds, cfg, q_m, init_state(ds.d(), cfg.K, Activation::Identity, rng));
}

GcnRun train_gcn(const Dataset& ds, const TrainConfig& cfg_in, double q_m, const GcnState& init) {
  TrainConfig cfg = cfg_in;
  cfg.K = init.K;
  cfg = resolve(cfg, ds.N(), q_m);

  GcnState st = init;
  st.s = 0.0;
  st.activation = Activation::Identity;
  const MatrixXd W1 = gd_step_W(ds, st, cfg, q_m);

  GcnRun run;
  if (cfg.self_loop == SelfLoopPolicy::Trained) {
    run.s1 = estimate_s1(ds, W1, st.a_out, q_m);
  } else {
    try {
      run.s1 = estimate_s1(ds, W1, st.a_out, q_m);
    } catch (const DegenerateError&) {
      run.s1 = std::numeric_limits<double>::quiet_NaN();
    }
  }

  const ModelParams& p = ds.params;
  double s = 0.0;
  switch (cfg.self_loop) {
    case SelfLoopPolicy::Trained: s = run.s1; break;
    case SelfLoopPolicy::Optimal:
      s = p.a_tau == p.b_tau ? 0.0 : optimal_s(p.a_tau, p.b_tau, p.c_tau());
      break;
    case SelfLoopPolicy::Zero: s = 0.0; break;
    case SelfLoopPolicy::Explicit: s = cfg.rho / q_m; break;
  }

  st.W = W1;
  st.s = s;
  run.state = st;
  const VectorXd f = gcn_forward(ds, st, q_m);
  run.estimate = Estimate::from_scores(f.tail(ds.m()), Method::Gcn,
                                       {{"s", s},
                                        {"rho", s * q_m},
                                        {"s1", run.s1},
                                        {"K", cfg.K},
                                        {"eta1", cfg.eta1},
                                        {"lambda1", cfg.lambda1}});
  return run;
}

GcnRun train_gcn_iterative(const Dataset& ds, const TrainConfig& cfg_in, double q_m, Rng& rng) {
  const TrainConfig cfg = resolve(cfg_in, ds.N(), q_m);
  if (cfg.steps_stage2 < 0) throw ParameterError("steps_stage2 must be nonnegative");

  GcnState st = init_state(ds.d(), cfg.K, Activation::Identity, rng);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  st.s = unif(rng);
  const MatrixXd W1 = gd_step_W(ds, st, cfg, q_m);

  GcnState st2;
  st2.K = 1;
  st2.W = W1 * st.a_out;
  st2.a_out = VectorXd::Ones(1);
  st2.s = st.s;
  st2.activation = Activation::Tanh;

  GcnRun run;
  const double D0 = realized_degree(ds);
  double eta = cfg.eta_t;
  int rejected = 0;
  for (int t = 0; t < cfg.steps_stage2; ++t) {
    run.loss_history.push_back(mse_loss(ds, st2, q_m));
    const double g = loss_grad_s(ds, st2, q_m);
    bool accepted = false;
    for (int tries = 0; tries < 60 && !accepted; ++tries) {
      const double next = st2.s - eta * g + cfg.lambda_t * st2.s;
      if (D0 + next * q_m > 0.0) {
        st2.s = next;
        accepted = true;
      } else {
        eta *= 0.5;
        ++rejected;
      }
    }
    if (!accepted) break;
  }
  run.loss_history.push_back(mse_loss(ds, st2, q_m));

  run.s1 = st2.s;
  run.state = st2;
  const VectorXd f = gcn_forward(ds, st2, q_m);
  run.estimate = Estimate::from_scores(f.tail(ds.m()), Method::Gcn,
                                       {{"s", st2.s},
                                        {"rho", st2.s * q_m},
                                        {"s0", st.s},
                                        {"K", cfg.K},
                                        {"eta1", cfg.eta1},
                                        {"lambda1", cfg.lambda1},
                                        {"eta_t_final", eta},
                                        {"rejected_steps", rejected}});
  return run;
}

}  // namespace csbm
