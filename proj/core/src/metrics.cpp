#include "csbm/metrics.hpp"

#include <algorithm>

#include "csbm/errors.hpp"

namespace csbm {

namespace {

Eigen::Index disagreements(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_hat) {
  if (y_true.size() != y_hat.size()) throw ParameterError("label vectors differ in length");
  Eigen::Index count = 0;
  for (Eigen::Index i = 0; i < y_true.size(); ++i) count += (y_true(i) != y_hat(i));
  return count;
}

}  // namespace

double mismatch(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_hat) {
  const Eigen::Index m = y_true.size();
  if (m == 0) return 0.0;
  const Eigen::Index wrong = disagreements(y_true, y_hat);
  // Flipping y_hat turns every agreement into a disagreement.
  return static_cast<double>(std::min(wrong, m - wrong)) / static_cast<double>(m);
}

double hamming(const Eigen::VectorXd& y_true, const Eigen::VectorXd& y_hat) {
  if (y_true.size() == 0) return 0.0;
  return static_cast<double>(disagreements(y_true, y_hat)) / static_cast<double>(y_true.size());
}

TrialOutcome TrialOutcome::from_labels(const Eigen::VectorXd& y_true,
                                       const Eigen::VectorXd& y_hat, std::string method,
                                       std::uint64_t seed) {
  TrialOutcome t;
  t.mismatch = csbm::mismatch(y_true, y_hat);
  t.exact = t.mismatch == 0.0;
  t.method = std::move(method);
  t.seed = seed;
  return t;
}

}  // namespace csbm
