#pragma once

// Experiment configuration. Files are JSON or a TOML subset (tables, key = value,
// strings, numbers, booleans, arrays and inline tables), both mapped onto the same
// kebab-case keys:
//
//   kind = "phase" | "curve" | "risk" | "single"
//   method = "pca-dense" | "pca-sparse" | "lrr" | "gcn" | "genie"
//   trials, base-seed, rho, rho-baseline, lambda, out
//   [grid]  a, b, c-tau, tau, n, d, q-m
//   [gcn]   K, eta1, lambda1, algorithm, steps_stage2, eta_t, lambda_t
//
// An axis is a number, an array, {values = [...]}, {from, to, count} or {from, to, step}.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "csbm/estimate.hpp"
#include "csbm/gcn.hpp"
#include "csbm/model.hpp"

namespace csbm {

nlohmann::json parse_toml(std::string_view text);

/// JSON when the extension is .json, TOML otherwise.
nlohmann::json load_config_file(const std::filesystem::path& path);

enum class ExperimentKind { PhaseDiagram, MismatchCurve, RiskSweep, SingleTrial };
std::string_view to_string(ExperimentKind k);
ExperimentKind kind_from_string(std::string_view s);

struct RhoPolicy {
  enum class Kind { Zero, Optimal, Trained, Explicit };
  Kind kind = Kind::Zero;
  double value = 0.0;

  /// "zero", "optimal", "trained" or a number.
  static RhoPolicy parse(std::string_view s);
  std::string str() const;
};

enum class GcnAlgorithm { TwoStep, Iterative };

struct GridSpec {
  std::vector<double> a;
  std::vector<double> b;
  std::vector<double> c_tau{0.5};
  std::vector<double> tau{0.25};
  std::vector<int> N{800};
  std::vector<int> d{40};
  QmRule q_m{};
};

struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::PhaseDiagram;
  Method method = Method::PcaDense;
  GridSpec grid;
  int trials = 0;  // 0: method default (10 for gcn, 20 otherwise)
  std::uint64_t base_seed = 1;
  RhoPolicy rho;
  std::optional<RhoPolicy> rho_baseline;
  std::vector<double> lambda{0.1};
  TrainConfig gcn;
  GcnAlgorithm gcn_algorithm = GcnAlgorithm::TwoStep;
  std::string out;

  int effective_trials() const;
  /// Throws ConfigError on an empty axis, trials < 1, non-positive lambda, or a
  /// policy the method cannot use.
  void validate() const;
};

/// Unknown keys raise ConfigError.
ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);

/// CLI axis syntax: "v", "v1,v2,...", or "from:to:count".
std::vector<double> parse_axis(std::string_view text);

/// Axis from a JSON value (see header comment).
std::vector<double> axis_from_json(const nlohmann::json& j, std::string_view name);

QmRule qm_rule_from_string(std::string_view s);

}  // namespace csbm
