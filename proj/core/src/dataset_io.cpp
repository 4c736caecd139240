#include "csbm/dataset_io.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "csbm/errors.hpp"

namespace csbm {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream os(p);
  if (!os) throw ConfigError("cannot write " + p.string());
  os << std::setprecision(17);
  return os;
}

std::ifstream open_in(const fs::path& p) {
  std::ifstream is(p);
  if (!is) throw ConfigError("cannot read " + p.string());
  return is;
}

std::vector<double> parse_row(const std::string& line) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) out.push_back(std::stod(cell));
  return out;
}

}  // namespace

json spec_to_json(const ModelSpec& spec) {
  json j = {{"a", spec.a},     {"b", spec.b}, {"c-tau", spec.c_tau},
            {"tau", spec.tau}, {"n", spec.N}, {"d", spec.d}};
  if (spec.q_m_rule.kind == QmRule::Kind::LogM) {
    j["q-m"] = "log";
  } else {
    j["q-m"] = spec.q_m_rule.value;
  }
  return j;
}

ModelSpec spec_from_json(const json& j) {
  ModelSpec s;
  s.a = j.at("a").get<double>();
  s.b = j.at("b").get<double>();
  s.c_tau = j.at("c-tau").get<double>();
  s.tau = j.at("tau").get<double>();
  s.N = j.at("n").get<int>();
  s.d = j.at("d").get<int>();
  const json& q = j.at("q-m");
  s.q_m_rule = q.is_string() ? QmRule::log_m() : QmRule::explicit_value(q.get<double>());
  return s;
}

void save_dataset(const Dataset& ds, const fs::path& dir) {
  fs::create_directories(dir);
  {
    auto os = open_out(dir / "A.csv");
    for (Index i = 0; i < ds.A.outerSize(); ++i) {
      for (SparseAdjacency::InnerIterator it(ds.A, i); it; ++it) {
        if (it.col() > i) os << i << ',' << it.col() << '\n';
      }
    }
  }
  {
    auto os = open_out(dir / "X.csv");
    for (Index i = 0; i < ds.X.rows(); ++i) {
      for (Index k = 0; k < ds.X.cols(); ++k) os << (k ? "," : "") << ds.X(i, k);
      os << '\n';
    }
  }
  {
    auto os = open_out(dir / "y.csv");
    for (Index i = 0; i < ds.y.size(); ++i) os << static_cast<int>(ds.y(i)) << '\n';
  }
  const ModelParams& p = ds.params;
  json meta = {{"params", spec_to_json(p.spec)},
               {"derived",
                {{"n", p.n},
                 {"m", p.m},
                 {"q_m", p.q_m},
                 {"alpha", p.alpha},
                 {"beta", p.beta},
                 {"a_tau", p.a_tau},
                 {"b_tau", p.b_tau},
                 {"theta", p.theta}}},
               {"seed", ds.seed},
               {"mu", std::vector<double>(ds.mu.data(), ds.mu.data() + ds.mu.size())}};
  auto os = open_out(dir / "meta.json");
  os << meta.dump(2) << '\n';
}

Dataset load_dataset(const fs::path& dir) {
  json meta;
  {
    auto is = open_in(dir / "meta.json");
    try {
      is >> meta;
    } catch (const json::exception& e) {
      throw ConfigError("malformed meta.json: " + std::string(e.what()));
    }
  }
  const ModelParams params = ModelParams::derive(spec_from_json(meta.at("params")));
  const int N = params.N();
  const int d = params.d();

  MatrixXd A = MatrixXd::Zero(N, N);
  {
    auto is = open_in(dir / "A.csv");
    std::string line;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto r = parse_row(line);
      if (r.size() != 2) throw ConfigError("A.csv: expected i,j");
      const auto i = static_cast<Index>(r[0]);
      const auto j = static_cast<Index>(r[1]);
      if (i < 0 || j < 0 || i >= N || j >= N) throw ConfigError("A.csv: index out of range");
      A(i, j) = A(j, i) = 1.0;
    }
  }
  MatrixXd X(N, d);
  {
    auto is = open_in(dir / "X.csv");
    std::string line;
    Index i = 0;
    while (std::getline(is, line)) {
      if (line.empty()) continue;
      const auto r = parse_row(line);
      if (i >= N || static_cast<int>(r.size()) != d) throw ConfigError("X.csv: bad shape");
      for (int k = 0; k < d; ++k) X(i, k) = r[k];
      ++i;
    }
    if (i != N) throw ConfigError("X.csv: bad row count");
  }
  VectorXd y(N);
  {
    auto is = open_in(dir / "y.csv");
    Index i = 0;
    double v;
    while (is >> v) {
      if (i >= N) throw ConfigError("y.csv: too many labels");
      y(i++) = v;
    }
    if (i != N) throw ConfigError("y.csv: bad length");
  }
  const auto mu_v = meta.at("mu").get<std::vector<double>>();
  VectorXd mu = Eigen::Map<const VectorXd>(mu_v.data(), static_cast<Index>(mu_v.size()));
  return make_dataset(params, A, std::move(X), std::move(y), std::move(mu),
                      meta.at("seed").get<std::uint64_t>());
}

}  // namespace csbm
