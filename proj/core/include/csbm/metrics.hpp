#pragma once

#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace csbm {

/// Fraction of disagreements, minimized over a global sign flip of y_hat.
double mismatch(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_hat);

/// Plain fraction of disagreeing entries.
double hamming(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_hat);

struct TrialOutcome {
  double mismatch = 0.0;
  bool exact = false;
  std::string method;
  std::uint64_t seed = 0;

  static TrialOutcome from_labels(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_hat,
                                  std::string method, std::uint64_t seed);
};

}  // namespace csbm
