#pragma once

// Monte-Carlo experiment driver. Every (cell, trial) job gets the seed
// derive_seed(base_seed, cell, trial), so results do not depend on how jobs are
// scheduled over workers. Rows are stored in (cell, trial) order.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csbm/config.hpp"
#include "csbm/estimate.hpp"
#include "csbm/model.hpp"

namespace csbm {

struct Cell {
  ModelSpec spec;
  double lambda = 0.1;
};

struct TrialRow {
  Index cell = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  std::string status = "ok";  // ok | degenerate | numeric | parameter
  double mismatch = NAN;
  bool exact = false;
  double train_mse = NAN;
  double test_mse = NAN;
  double s = NAN;  // self-loop coefficient actually used (lrr, gcn)
  double baseline_mismatch = NAN;
  bool baseline_exact = false;
  double runtime_seconds = 0.0;
};

struct CellSummary {
  int trials = 0;
  int ok = 0;
  double exact_freq = 0.0;      // errored trials count as failures
  double mean_mismatch = NAN;   // over ok trials
  double train_mse = NAN;
  double test_mse = NAN;
  double s = NAN;
  double baseline_exact_freq = 0.0;
  double baseline_mean_mismatch = NAN;
};

struct TrialGrid {
  ExperimentConfig config;
  std::vector<Cell> cells;
  std::vector<TrialRow> rows;  // cells.size() * trials, (cell, trial) order
  std::vector<CellSummary> summary;
};

/// Cartesian product N x tau x c_tau x d x a x b (x lambda for risk sweeps), last fastest.
std::vector<Cell> expand_cells(const ExperimentConfig& cfg);

/// CSBM_THREADS if set to a positive integer, else the available hardware parallelism.
int worker_count();

/// One trial: sample the dataset for `seed` and run the configured estimator.
/// Estimator and parameter errors are recorded in the row's status.
TrialRow run_trial(const ExperimentConfig& cfg, const Cell& cell, Index cell_index, int trial,
                   std::uint64_t seed);

CellSummary summarize(const std::vector<TrialRow>& rows);

/// Runs every job over `threads` workers (0: worker_count()).
TrialGrid run_experiment(const ExperimentConfig& cfg, int threads = 0);

TrialGrid run_phase_diagram(const ExperimentConfig& cfg, int threads = 0);
TrialGrid run_mismatch_curve(const ExperimentConfig& cfg, int threads = 0);
TrialGrid run_risk_sweep(const ExperimentConfig& cfg, int threads = 0);

/// 17 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_double(double v);

std::string summary_csv(const TrialGrid& grid);
std::string rows_csv(const TrialGrid& grid);
std::string timing_csv(const TrialGrid& grid);
/// Plot recipe: column mapping plus sampled theory curves.
nlohmann::json plot_recipe(const TrialGrid& grid);

/// Writes the summary to `summary_path` and rows.csv, timing.csv, plot.json next to it.
void write_outputs(const TrialGrid& grid, const std::filesystem::path& summary_path);

}  // namespace csbm
