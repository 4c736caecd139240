#include "csbm/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include "csbm/errors.hpp"
#include "csbm/gcn.hpp"
#include "csbm/metrics.hpp"
#include "csbm/ridge.hpp"
#include "csbm/spectral.hpp"
#include "csbm/theory.hpp"

namespace csbm {

namespace {

constexpr std::uint64_t kDataStream = 1;
constexpr std::uint64_t kInitStream = 2;

struct MethodResult {
  VectorXd labels;
  double train_mse = NAN;
  double test_mse = NAN;
  double s = NAN;
};

double policy_s(const RhoPolicy& rho, const ModelParams& p) {
  switch (rho.kind) {
    case RhoPolicy::Kind::Zero: return 0.0;
    case RhoPolicy::Kind::Optimal:
      // Undefined for a = b; fall back to no self-loop.
      return p.a_tau == p.b_tau ? 0.0 : optimal_s(p.a_tau, p.b_tau, p.c_tau());
    case RhoPolicy::Kind::Explicit: return rho.value / p.q_m;
    case RhoPolicy::Kind::Trained: break;
  }
  throw ConfigError("rho = trained only applies to the gcn method");
}

MethodResult run_method(const ExperimentConfig& cfg, const RhoPolicy& rho, const Dataset& ds,
                        double lambda, std::uint64_t seed) {
  MethodResult r;
  switch (cfg.method) {
    case Method::PcaDense: r.labels = estimate_pca_dense(ds).labels; break;
    case Method::PcaSparse: r.labels = estimate_pca_sparse(ds).labels; break;
    case Method::Genie: r.labels = estimate_genie(ds).labels; break;
    case Method::Lrr: {
      r.s = policy_s(rho, ds.params);
      const RidgePrediction pred = fit_lrr(ds, {r.s * ds.params.q_m, lambda});
      r.labels = pred.estimate.labels;
      r.train_mse = pred.train_mse;
      r.test_mse = pred.test_mse;
      break;
    }
    case Method::Gcn: {
      TrainConfig tc = cfg.gcn;
      if (rho.kind == RhoPolicy::Kind::Trained) {
        tc.self_loop = SelfLoopPolicy::Trained;
      } else {
        tc.self_loop = SelfLoopPolicy::Explicit;
        tc.rho = policy_s(rho, ds.params) * ds.params.q_m;
      }
      Rng rng = make_rng(substream_seed(seed, kInitStream));
      const GcnRun run = cfg.gcn_algorithm == GcnAlgorithm::TwoStep
                             ? train_gcn(ds, tc, ds.params.q_m, rng)
                             : train_gcn_iterative(ds, tc, ds.params.q_m, rng);
      r.labels = run.estimate.labels;
      r.s = run.estimate.hyper.at("s");
      break;
    }
  }
  return r;
}

const char* status_of(const std::exception& e) {
  if (dynamic_cast<const DegenerateError*>(&e)) return "degenerate";
  if (dynamic_cast<const NumericError*>(&e)) return "numeric";
  return "parameter";
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return NAN;
  double sum = 0.0;
  for (double x : v) sum += x;
  return sum / static_cast<double>(v.size());
}

struct CellTheory {
  double a_tau, b_tau, q_m, I;
};

CellTheory cell_theory(const Cell& c) {
  CellTheory t{};
  const double keep = 1.0 - c.spec.tau;
  t.a_tau = c.spec.a / keep;
  t.b_tau = c.spec.b / keep;
  t.I = rate_I(t.a_tau, t.b_tau, c.spec.c_tau);
  try {
    t.q_m = c.spec.q_m_rule.evaluate(split_sizes(c.spec.N, c.spec.tau).second);
  } catch (const Error&) {
    t.q_m = NAN;
  }
  return t;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
  if (!out) throw ConfigError("failed writing " + path.string());
}

std::string join(std::initializer_list<std::string> parts) {
  std::string out;
  bool first = true;
  for (const auto& p : parts) {
    if (!first) out += ',';
    out += p;
    first = false;
  }
  return out;
}

std::string fd(double v) { return format_double(v); }
std::string fi(long long v) { return std::to_string(v); }

}  // namespace

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<Cell> expand_cells(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& g = cfg.grid;
  const std::vector<double> lambdas =
      cfg.kind == ExperimentKind::RiskSweep ? cfg.lambda : std::vector<double>{cfg.lambda.front()};
  std::vector<Cell> cells;
  for (int N : g.N) {
    for (double tau : g.tau) {
      for (double c : g.c_tau) {
        for (int d : g.d) {
          for (double a : g.a) {
            for (double b : g.b) {
              for (double lambda : lambdas) {
                Cell cell;
                cell.spec = ModelSpec{a, b, c, tau, N, d, g.q_m};
                cell.lambda = lambda;
                cells.push_back(cell);
              }
            }
          }
        }
      }
    }
  }
  return cells;
}

int worker_count() {
  if (const char* env = std::getenv("CSBM_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

TrialRow run_trial(const ExperimentConfig& cfg, const Cell& cell, Index cell_index, int trial,
                   std::uint64_t seed) {
  TrialRow row;
  row.cell = cell_index;
  row.trial = trial;
  row.seed = seed;
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const ModelParams p = ModelParams::derive(cell.spec);
    const Dataset ds = sample_csbm(p, substream_seed(seed, kDataStream));
    const MethodResult r = run_method(cfg, cfg.rho, ds, cell.lambda, seed);
    row.mismatch = mismatch(ds.y_test(), r.labels);
    row.exact = row.mismatch == 0.0;
    row.train_mse = r.train_mse;
    row.test_mse = r.test_mse;
    row.s = r.s;
    if (cfg.rho_baseline) {
      try {
        const MethodResult b = run_method(cfg, *cfg.rho_baseline, ds, cell.lambda, seed);
        row.baseline_mismatch = mismatch(ds.y_test(), b.labels);
        row.baseline_exact = row.baseline_mismatch == 0.0;
      } catch (const ConfigError&) {
        throw;
      } catch (const Error&) {
        // baseline failure leaves its columns as nan
      }
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    row.status = status_of(e);
    row.mismatch = NAN;
    row.exact = false;
  }
  row.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return row;
}

CellSummary summarize(const std::vector<TrialRow>& rows) {
  CellSummary s;
  s.trials = static_cast<int>(rows.size());
  std::vector<double> mis, train, test, svals, base;
  int exact = 0;
  int base_exact = 0;
  for (const auto& r : rows) {
    if (r.status != "ok") continue;
    ++s.ok;
    mis.push_back(r.mismatch);
    exact += r.exact;
    if (!std::isnan(r.train_mse)) train.push_back(r.train_mse);
    if (!std::isnan(r.test_mse)) test.push_back(r.test_mse);
    if (!std::isnan(r.s)) svals.push_back(r.s);
    if (!std::isnan(r.baseline_mismatch)) {
      base.push_back(r.baseline_mismatch);
      base_exact += r.baseline_exact;
    }
  }
  if (s.trials > 0) {
    s.exact_freq = static_cast<double>(exact) / s.trials;
    s.baseline_exact_freq = static_cast<double>(base_exact) / s.trials;
  }
  s.mean_mismatch = mean_of(mis);
  s.train_mse = mean_of(train);
  s.test_mse = mean_of(test);
  s.s = mean_of(svals);
  s.baseline_mean_mismatch = mean_of(base);
  return s;
}

TrialGrid run_experiment(const ExperimentConfig& cfg, int threads) {
  TrialGrid grid;
  grid.config = cfg;
  grid.cells = expand_cells(cfg);
  const int trials = cfg.effective_trials();
  const std::size_t jobs = grid.cells.size() * static_cast<std::size_t>(trials);
  grid.rows.resize(jobs);

  const int workers = std::max(1, std::min<int>(threads > 0 ? threads : worker_count(),
                                                static_cast<int>(jobs)));
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto work = [&] {
    for (;;) {
      const std::size_t k = next.fetch_add(1);
      if (k >= jobs) return;
      const Index cell = static_cast<Index>(k / static_cast<std::size_t>(trials));
      const int trial = static_cast<int>(k % static_cast<std::size_t>(trials));
      try {
        grid.rows[k] = run_trial(cfg, grid.cells[static_cast<std::size_t>(cell)], cell, trial,
                                 derive_seed(cfg.base_seed, static_cast<std::uint64_t>(cell),
                                             static_cast<std::uint64_t>(trial)));
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(jobs);
        return;
      }
    }
  };
  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    const auto first = grid.rows.begin() + static_cast<std::ptrdiff_t>(c * trials);
    grid.summary.push_back(summarize(std::vector<TrialRow>(first, first + trials)));
  }
  return grid;
}

TrialGrid run_phase_diagram(const ExperimentConfig& cfg, int threads) {
  if (cfg.kind != ExperimentKind::PhaseDiagram) throw ConfigError("expected kind = phase");
  return run_experiment(cfg, threads);
}

TrialGrid run_mismatch_curve(const ExperimentConfig& cfg, int threads) {
  if (cfg.kind != ExperimentKind::MismatchCurve) throw ConfigError("expected kind = curve");
  return run_experiment(cfg, threads);
}

TrialGrid run_risk_sweep(const ExperimentConfig& cfg, int threads) {
  if (cfg.kind != ExperimentKind::RiskSweep) throw ConfigError("expected kind = risk");
  return run_experiment(cfg, threads);
}

std::string summary_csv(const TrialGrid& grid) {
  std::ostringstream os;
  const auto& cfg = grid.config;
  const bool baseline = cfg.rho_baseline.has_value();
  switch (cfg.kind) {
    case ExperimentKind::PhaseDiagram:
    case ExperimentKind::SingleTrial:
      os << "a,b,a_tau,b_tau,c_tau,I,trials,exact_freq,mean_mismatch\n";
      break;
    case ExperimentKind::MismatchCurve:
      os << "a,b,a_tau,b_tau,c_tau,N,q_m,I,trials,exact_freq,mean_mismatch,log_mean_over_qm,neg_I";
      if (baseline) os << ",baseline_mean_mismatch,mismatch_difference";
      os << '\n';
      break;
    case ExperimentKind::RiskSweep:
      os << "a,b,a_tau,b_tau,c_tau,tau,N,d,lambda,s,trials,train_mse,test_mse,predicted_risk\n";
      break;
  }
  for (std::size_t c = 0; c < grid.cells.size(); ++c) {
    const Cell& cell = grid.cells[c];
    const CellSummary& s = grid.summary[c];
    const CellTheory t = cell_theory(cell);
    const auto& sp = cell.spec;
    switch (cfg.kind) {
      case ExperimentKind::PhaseDiagram:
      case ExperimentKind::SingleTrial:
        os << join({fd(sp.a), fd(sp.b), fd(t.a_tau), fd(t.b_tau), fd(sp.c_tau), fd(t.I),
                    fi(s.trials), fd(s.exact_freq), fd(s.mean_mismatch)});
        break;
      case ExperimentKind::MismatchCurve: {
        std::string logcol;
        if (s.mean_mismatch == 0.0) {
          logcol = "-inf";
        } else {
          logcol = fd(std::log(s.mean_mismatch) / t.q_m);
        }
        os << join({fd(sp.a), fd(sp.b), fd(t.a_tau), fd(t.b_tau), fd(sp.c_tau), fi(sp.N),
                    fd(t.q_m), fd(t.I), fi(s.trials), fd(s.exact_freq), fd(s.mean_mismatch), logcol,
                    fd(-t.I)});
        if (baseline) {
          os << ',' << fd(s.baseline_mean_mismatch) << ','
             << fd(s.mean_mismatch - s.baseline_mean_mismatch);
        }
        break;
      }
      case ExperimentKind::RiskSweep: {
        double predicted = NAN;
        if (!std::isnan(s.s)) {
          try {
            const KappaZeta kz = kappa_zeta(t.a_tau, t.b_tau, sp.c_tau, s.s, sp.tau, cell.lambda);
            predicted = asymptotic_risk(kz.kappa, sp.tau, cell.lambda);
          } catch (const Error&) {
          }
        }
        os << join({fd(sp.a), fd(sp.b), fd(t.a_tau), fd(t.b_tau), fd(sp.c_tau), fd(sp.tau),
                    fi(sp.N), fi(sp.d), fd(cell.lambda), fd(s.s), fi(s.trials), fd(s.train_mse),
                    fd(s.test_mse), fd(predicted)});
        break;
      }
    }
    os << '\n';
  }
  return os.str();
}

std::string rows_csv(const TrialGrid& grid) {
  std::ostringstream os;
  os << "cell,trial,seed,a,b,c_tau,tau,N,d,lambda,method,rho,status,mismatch,exact,"
        "train_mse,test_mse,s,baseline_mismatch,baseline_exact\n";
  const std::string method(to_string(grid.config.method));
  const std::string rho = grid.config.rho.str();
  for (const auto& r : grid.rows) {
    const Cell& cell = grid.cells[static_cast<std::size_t>(r.cell)];
    const auto& sp = cell.spec;
    os << join({fi(r.cell), fi(r.trial), std::to_string(r.seed), fd(sp.a), fd(sp.b), fd(sp.c_tau),
                fd(sp.tau), fi(sp.N), fi(sp.d), fd(cell.lambda), method, rho, r.status,
                fd(r.mismatch), fi(r.exact), fd(r.train_mse), fd(r.test_mse), fd(r.s),
                fd(r.baseline_mismatch), fi(r.baseline_exact)})
       << '\n';
  }
  return os.str();
}

std::string timing_csv(const TrialGrid& grid) {
  std::ostringstream os;
  os << "cell,trial,runtime_seconds\n";
  for (const auto& r : grid.rows) {
    os << r.cell << ',' << r.trial << ',' << fd(r.runtime_seconds) << '\n';
  }
  return os.str();
}

nlohmann::json plot_recipe(const TrialGrid& grid) {
  using nlohmann::json;
  const auto& cfg = grid.config;
  json j;
  j["config"] = config_to_json(cfg);
  j["summary_columns"] = json::array();
  {
    const std::string csv = summary_csv(grid);
    const std::string header = csv.substr(0, csv.find('\n'));
    std::stringstream ss(header);
    std::string col;
    while (std::getline(ss, col, ',')) j["summary_columns"].push_back(col);
  }
  const auto& g = cfg.grid;
  switch (cfg.kind) {
    case ExperimentKind::PhaseDiagram:
    case ExperimentKind::SingleTrial: {
      j["x"] = "b";
      j["y"] = "a";
      j["value"] = "exact_freq";
      json curves = json::array();
      const double bmin = *std::min_element(g.b.begin(), g.b.end());
      const double bmax = *std::max_element(g.b.begin(), g.b.end());
      for (double tau : g.tau) {
        for (double c : g.c_tau) {
          json red = json::array();
          json blue = json::array();
          double c0 = NAN;
          try {
            const ModelParams p = ModelParams::derive(
                ModelSpec{std::max(bmin, 1.0), std::max(bmin, 1.0), c, tau, g.N.front(),
                          g.d.front(), g.q_m});
            c0 = unsupervised_c0(p.theta, p.q_m, p.d(), p.m);
          } catch (const Error&) {
          }
          constexpr int kSamples = 101;
          for (int k = 0; k < kSamples; ++k) {
            const double b = bmin + (bmax - bmin) * k / (kSamples - 1);
            // Semi-supervised boundary I(a_tau, b_tau, c_tau) = 1, mapped back to raw a.
            try {
              const auto [hi, lo] = boundary_solve(b / (1.0 - tau), c, 1.0);
              red.push_back({{"b", b}, {"a_upper", hi * (1.0 - tau)}, {"a_lower", lo * (1.0 - tau)}});
            } catch (const Error&) {
            }
            if (!std::isnan(c0)) {
              try {
                const auto [hi, lo] = boundary_solve(b, c0, 1.0);
                blue.push_back({{"b", b}, {"a_upper", hi}, {"a_lower", lo}});
              } catch (const Error&) {
              }
            }
          }
          curves.push_back({{"tau", tau}, {"c_tau", c}, {"c0", c0}, {"red", red}, {"blue", blue}});
        }
      }
      j["boundaries"] = curves;
      break;
    }
    case ExperimentKind::MismatchCurve: {
      j["x"] = "a";
      j["y"] = "log_mean_over_qm";
      j["group"] = "N";
      j["red_curve_column"] = "neg_I";
      double I_max = 0.0;
      json red = json::array();
      const double amin = *std::min_element(g.a.begin(), g.a.end());
      const double amax = *std::max_element(g.a.begin(), g.a.end());
      for (double tau : g.tau) {
        for (double c : g.c_tau) {
          for (double b : g.b) {
            for (int k = 0; k < 101; ++k) {
              const double a = amin + (amax - amin) * k / 100.0;
              const double I = rate_I(a / (1.0 - tau), b / (1.0 - tau), c);
              I_max = std::max(I_max, I);
              red.push_back({{"a", a}, {"b", b}, {"tau", tau}, {"c_tau", c}, {"neg_I", -I}});
            }
          }
        }
      }
      j["red_curve"] = red;
      j["log_zero"] = "-inf";
      j["clip_at"] = -(I_max + 0.5);
      if (cfg.rho_baseline) {
        j["pairing"] = "paired-seeds";
        j["difference_column"] = "mismatch_difference";
        j["difference"] = "mean_mismatch(rho) - mean_mismatch(rho-baseline)";
      }
      break;
    }
    case ExperimentKind::RiskSweep:
      j["x"] = "lambda";
      j["y"] = json::array({"train_mse", "test_mse"});
      j["prediction_column"] = "predicted_risk";
      break;
  }
  return j;
}

void write_outputs(const TrialGrid& grid, const std::filesystem::path& summary_path) {
  const std::filesystem::path dir =
      summary_path.has_parent_path() ? summary_path.parent_path() : std::filesystem::path(".");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ConfigError("cannot create output directory " + dir.string());
  write_file(summary_path, summary_csv(grid));
  write_file(dir / "rows.csv", rows_csv(grid));
  write_file(dir / "timing.csv", timing_csv(grid));
  write_file(dir / "plot.json", plot_recipe(grid).dump(2) + "\n");
}

}  // namespace csbm
