#include "csbm_cli/cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "csbm/config.hpp"
#include "csbm/dataset_io.hpp"
#include "csbm/errors.hpp"
#include "csbm/harness.hpp"
#include "csbm/metrics.hpp"
#include "csbm/ridge.hpp"
#include "csbm/spectral.hpp"
#include "csbm/theory.hpp"

namespace csbm::cli {

namespace {

// Raw flag values; empty means "not given".
struct Flags {
  std::string config;
  std::string a, b, c_tau, tau, n, d, q_m, lambda;
  std::optional<int> trials;
  std::optional<std::uint64_t> seed;
  std::string method;
  std::string rho;
  std::string rho_baseline;
  std::string out;
  std::string data;
  std::optional<int> threads;
};

void add_model_flags(CLI::App* app, Flags& f, bool axes) {
  const char* hint = axes ? "value, v1,v2,... or from:to:count" : "value";
  app->add_option("--a", f.a, std::string("within-community degree scale (") + hint + ")");
  app->add_option("--b", f.b, std::string("cross-community degree scale (") + hint + ")");
  app->add_option("--c-tau", f.c_tau, "feature signal strength");
  app->add_option("--tau", f.tau, "fraction of revealed labels");
  app->add_option("--n", f.n, "number of nodes N");
  app->add_option("--d", f.d, "feature dimension");
  app->add_option("--q-m", f.q_m, "sparsity scale: 'log' or a positive number");
}

void add_run_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "TOML or JSON experiment config");
  app->add_option("--trials", f.trials, "trials per cell");
  app->add_option("--seed", f.seed, "base seed");
  app->add_option("--method", f.method, "pca-dense | pca-sparse | lrr | gcn | genie");
  app->add_option("--rho", f.rho, "self-loop: zero | optimal | trained | <float>");
  app->add_option("--rho-baseline", f.rho_baseline, "paired comparison policy");
  app->add_option("--lambda", f.lambda, "ridge penalty (risk sweeps accept a list)");
  app->add_option("--out", f.out, "summary CSV path");
  app->add_option("--threads", f.threads, "worker count (overrides CSBM_THREADS)");
}

double scalar(const std::string& s, const char* name) {
  const auto v = parse_axis(s);
  if (v.size() != 1) throw ConfigError(std::string("--") + name + " takes a single value");
  return v.front();
}

int integer(const std::string& s, const char* name) {
  const double v = scalar(s, name);
  if (v != std::floor(v)) throw ConfigError(std::string("--") + name + " must be an integer");
  return static_cast<int>(v);
}

std::vector<int> int_axis(const std::string& s, const char* name) {
  std::vector<int> out;
  for (double v : parse_axis(s)) {
    if (v != std::floor(v)) throw ConfigError(std::string("--") + name + " must be integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

ExperimentConfig build_config(const Flags& f, ExperimentKind kind) {
  ExperimentConfig cfg;
  if (!f.config.empty()) cfg = config_from_json(load_config_file(f.config));
  cfg.kind = kind;
  auto& g = cfg.grid;
  if (!f.a.empty()) g.a = parse_axis(f.a);
  if (!f.b.empty()) g.b = parse_axis(f.b);
  if (!f.c_tau.empty()) g.c_tau = parse_axis(f.c_tau);
  if (!f.tau.empty()) g.tau = parse_axis(f.tau);
  if (!f.n.empty()) g.N = int_axis(f.n, "n");
  if (!f.d.empty()) g.d = int_axis(f.d, "d");
  if (!f.q_m.empty()) g.q_m = qm_rule_from_string(f.q_m);
  if (f.trials) {
    if (*f.trials < 1) throw ConfigError("--trials must be >= 1");
    cfg.trials = *f.trials;
  }
  if (f.seed) cfg.base_seed = *f.seed;
  if (!f.method.empty()) cfg.method = method_from_string(f.method);
  if (!f.rho.empty()) cfg.rho = RhoPolicy::parse(f.rho);
  if (!f.rho_baseline.empty()) cfg.rho_baseline = RhoPolicy::parse(f.rho_baseline);
  if (!f.lambda.empty()) cfg.lambda = parse_axis(f.lambda);
  if (!f.out.empty()) cfg.out = f.out;
  if (kind == ExperimentKind::RiskSweep && f.method.empty() && f.config.empty()) {
    cfg.method = Method::Lrr;
  }
  cfg.validate();
  return cfg;
}

ModelSpec single_spec(const Flags& f) {
  if (f.a.empty() || f.b.empty()) throw ConfigError("--a and --b are required");
  ModelSpec spec;
  spec.a = scalar(f.a, "a");
  spec.b = scalar(f.b, "b");
  spec.c_tau = f.c_tau.empty() ? 0.5 : scalar(f.c_tau, "c-tau");
  spec.tau = f.tau.empty() ? 0.25 : scalar(f.tau, "tau");
  spec.N = f.n.empty() ? 800 : integer(f.n, "n");
  spec.d = f.d.empty() ? 40 : integer(f.d, "d");
  if (!f.q_m.empty()) spec.q_m_rule = qm_rule_from_string(f.q_m);
  return spec;
}

int run_grid(const Flags& f, ExperimentKind kind, std::ostream& out) {
  const ExperimentConfig cfg = build_config(f, kind);
  const TrialGrid grid = run_experiment(cfg, f.threads.value_or(0));
  if (cfg.out.empty()) {
    out << summary_csv(grid);
  } else {
    write_outputs(grid, cfg.out);
    out << "wrote " << cfg.out << " (" << grid.rows.size() << " trials)\n";
  }
  return 0;
}

int run_sample(const Flags& f, std::ostream& out) {
  if (f.out.empty()) throw ConfigError("sample needs --out <directory>");
  const ModelParams p = ModelParams::derive(single_spec(f));
  const Dataset ds = sample_csbm(p, f.seed.value_or(1));
  save_dataset(ds, f.out);
  out << "N=" << ds.N() << " n=" << ds.n() << " m=" << ds.m() << " d=" << ds.d()
      << " edges=" << ds.A.nonZeros() / 2 << " q_m=" << format_double(p.q_m)
      << " theta=" << format_double(p.theta) << '\n';
  return 0;
}

int run_estimate(const Flags& f, std::ostream& out) {
  Dataset ds = f.data.empty() ? sample_csbm(ModelParams::derive(single_spec(f)), f.seed.value_or(1))
                              : load_dataset(f.data);
  ds.validate();
  const Method method = f.method.empty() ? Method::PcaDense : method_from_string(f.method);
  const RhoPolicy rho = f.rho.empty() ? RhoPolicy{} : RhoPolicy::parse(f.rho);
  const double lambda = f.lambda.empty() ? 0.1 : scalar(f.lambda, "lambda");
  const ModelParams& p = ds.params;

  Estimate est;
  switch (method) {
    case Method::PcaDense: est = estimate_pca_dense(ds); break;
    case Method::PcaSparse: est = estimate_pca_sparse(ds); break;
    case Method::Genie: est = estimate_genie(ds); break;
    case Method::Lrr: {
      double s = 0.0;
      if (rho.kind == RhoPolicy::Kind::Optimal && p.a_tau != p.b_tau) {
        s = optimal_s(p.a_tau, p.b_tau, p.c_tau());
      } else if (rho.kind == RhoPolicy::Kind::Explicit) {
        s = rho.value / p.q_m;
      } else if (rho.kind == RhoPolicy::Kind::Trained) {
        throw ConfigError("rho = trained only applies to the gcn method");
      }
      const RidgePrediction pred = fit_lrr(ds, {s * p.q_m, lambda});
      est = pred.estimate;
      est.hyper["train_mse"] = pred.train_mse;
      est.hyper["test_mse"] = pred.test_mse;
      break;
    }
    case Method::Gcn: {
      TrainConfig tc;
      switch (rho.kind) {
        case RhoPolicy::Kind::Trained: tc.self_loop = SelfLoopPolicy::Trained; break;
        case RhoPolicy::Kind::Optimal: tc.self_loop = SelfLoopPolicy::Optimal; break;
        case RhoPolicy::Kind::Zero: tc.self_loop = SelfLoopPolicy::Zero; break;
        case RhoPolicy::Kind::Explicit:
          tc.self_loop = SelfLoopPolicy::Explicit;
          tc.rho = rho.value;
          break;
      }
      Rng rng = make_rng(f.seed.value_or(1));
      est = train_gcn(ds, tc, p.q_m, rng).estimate;
      break;
    }
  }

  nlohmann::json j;
  j["method"] = to_string(method);
  j["mismatch"] = mismatch(ds.y_test(), est.labels);
  j["exact"] = j["mismatch"].get<double>() == 0.0;
  j["hyper"] = est.hyper;
  if (!est.notes.empty()) j["notes"] = est.notes;
  out << j.dump(2) << '\n';

  if (!f.out.empty()) {
    std::ofstream csv(f.out);
    if (!csv) throw ConfigError("cannot write " + f.out);
    csv << "node,score,label,truth\n";
    for (Index k = 0; k < est.scores.size(); ++k) {
      csv << ds.n() + k << ',' << format_double(est.scores(k)) << ',' << est.labels(k) << ','
          << ds.y_test()(k) << '\n';
    }
  }
  return 0;
}

int run_theory(const Flags& f, std::ostream& out) {
  const ModelSpec spec = single_spec(f);
  const double keep = 1.0 - spec.tau;
  const double a_tau = spec.a / keep;
  const double b_tau = spec.b / keep;
  const double c = spec.c_tau;
  const double lambda = f.lambda.empty() ? 0.1 : scalar(f.lambda, "lambda");
  out << "a_tau=" << format_double(a_tau) << '\n';
  out << "b_tau=" << format_double(b_tau) << '\n';
  out << "I=" << format_double(rate_I(a_tau, b_tau, c)) << '\n';
  if (a_tau != b_tau) {
    const double s = optimal_s(a_tau, b_tau, c);
    const KappaZeta kz = kappa_zeta(a_tau, b_tau, c, s, spec.tau, lambda);
    out << "s_opt=" << format_double(s) << '\n';
    out << "kappa=" << format_double(kz.kappa) << '\n';
    out << "zeta=" << format_double(kz.zeta) << '\n';
    out << "risk_limit=" << format_double(asymptotic_risk(kz.kappa, spec.tau, lambda)) << '\n';
    if (kz.zeta != 0.0) {
      out << "J_at_s_opt=" << format_double(rate_J(a_tau, b_tau, c, kz.zeta, s)) << '\n';
      out << "J_at_0=" << format_double(rate_J(a_tau, b_tau, c, kz.zeta, 0.0)) << '\n';
    }
  } else {
    out << "s_opt=undefined\n";
  }
  try {
    const auto [hi, lo] = boundary_solve(b_tau, c, 1.0);
    out << "boundary_a_tau=" << format_double(hi) << ',' << format_double(lo) << '\n';
    out << "boundary_a=" << format_double(hi * keep) << ',' << format_double(lo * keep) << '\n';
  } catch (const ParameterError&) {
    out << "boundary_a_tau=none\n";
  }
  try {
    const ModelParams p = ModelParams::derive(spec);
    const double c0 = unsupervised_c0(p.theta, p.q_m, p.d(), p.m);
    out << "c0=" << format_double(c0) << '\n';
    out << "I_unsup=" << format_double(rate_I(spec.a, spec.b, c0)) << '\n';
  } catch (const ParameterError&) {
    // The sampled model is infeasible at this N; the rates above still apply.
  }
  return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Semi-supervised community detection on the contextual SBM", "csbm"};
  app.require_subcommand(0, 1);
  Flags f;

  CLI::App* sample = app.add_subcommand("sample", "sample one dataset and save it to --out");
  add_model_flags(sample, f, false);
  sample->add_option("--seed", f.seed, "seed");
  sample->add_option("--out", f.out, "output directory");

  CLI::App* estimate = app.add_subcommand("estimate", "run one estimator on one dataset");
  add_model_flags(estimate, f, false);
  estimate->add_option("--data", f.data, "dataset directory written by 'sample'");
  estimate->add_option("--seed", f.seed, "seed");
  estimate->add_option("--method", f.method, "pca-dense | pca-sparse | lrr | gcn | genie");
  estimate->add_option("--rho", f.rho, "self-loop: zero | optimal | trained | <float>");
  estimate->add_option("--lambda", f.lambda, "ridge penalty");
  estimate->add_option("--out", f.out, "scores CSV");

  CLI::App* theory = app.add_subcommand("theory", "print rate functions and boundaries");
  add_model_flags(theory, f, false);
  theory->add_option("--lambda", f.lambda, "ridge penalty");

  CLI::App* phase = app.add_subcommand("phase", "exact-recovery frequency over an (a, b) grid");
  CLI::App* curve = app.add_subcommand("curve", "mean mismatch along an a sweep");
  CLI::App* risk = app.add_subcommand("risk", "ridge regression risks against their limit");
  for (CLI::App* sub : {phase, curve, risk}) {
    add_model_flags(sub, f, true);
    add_run_flags(sub, f);
  }

  if (argc <= 1) {
    err << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help(app.get_subcommands().empty() ? "" : app.get_subcommands().front()->get_name());
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (sample->parsed()) return run_sample(f, out);
    if (estimate->parsed()) return run_estimate(f, out);
    if (theory->parsed()) return run_theory(f, out);
    if (phase->parsed()) return run_grid(f, ExperimentKind::PhaseDiagram, out);
    if (curve->parsed()) return run_grid(f, ExperimentKind::MismatchCurve, out);
    if (risk->parsed()) return run_grid(f, ExperimentKind::RiskSweep, out);
    err << app.help();
    return 2;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const ParameterError& e) {
    err << "parameter error: " << e.what() << "\n";
    return 2;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const DegenerateError& e) {
    err << "numeric error: " << e.what() << "\n";
    return 3;
  } catch (const nlohmann::json::exception& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  }
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"csbm"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace csbm::cli
