#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace csbm {

enum class Method { PcaDense, PcaSparse, Lrr, Gcn, Genie };

std::string_view to_string(Method m);
/// Accepts the CLI spellings: pca-dense, pca-sparse, lrr, gcn, genie.
Method method_from_string(std::string_view s);

/// +1 for nonnegative scores, -1 for negative ones (zero ties go to +1).
Eigen::VectorXd sign_labels(const Eigen::VectorXd& scores);

/// Soft scores over the test nodes (dataset order) and their hard labels.
struct Estimate {
  Eigen::VectorXd scores;
  Eigen::VectorXd labels;
  Method method = Method::PcaDense;
  std::map<std::string, double> hyper;
  std::vector<std::string> notes;

  static Estimate from_scores(Eigen::VectorXd scores, Method method,
                              std::map<std::string, double> hyper = {});
};

}  // namespace csbm
