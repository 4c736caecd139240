#include "csbm/estimate.hpp"

#include <string>

#include "csbm/errors.hpp"

namespace csbm {

std::string_view to_string(Method m) {
  switch (m) {
    case Method::PcaDense: return "pca-dense";
    case Method::PcaSparse: return "pca-sparse";
    case Method::Lrr: return "lrr";
    case Method::Gcn: return "gcn";
    case Method::Genie: return "genie";
  }
  return "unknown";
}

Method method_from_string(std::string_view s) {
  for (Method m : {Method::PcaDense, Method::PcaSparse, Method::Lrr, Method::Gcn, Method::Genie}) {
    if (to_string(m) == s) return m;
  }
  throw ConfigError("unknown method '" + std::string(s) + "'");
}

Eigen::VectorXd sign_labels(const Eigen::VectorXd& scores) {
  return scores.unaryExpr([](double v) { return v < 0.0 ? -1.0 : 1.0; });
}

Estimate Estimate::from_scores(Eigen::VectorXd scores, Method method,
                               std::map<std::string, double> hyper) {
  Estimate e;
  e.labels = sign_labels(scores);
  e.scores = std::move(scores);
  e.method = method;
  e.hyper = std::move(hyper);
  return e;
}

}  // namespace csbm
