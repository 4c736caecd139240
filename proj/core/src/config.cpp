#include "csbm/config.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <cmath>
#include <fstream>
#include <sstream>

#include "csbm/errors.hpp"

namespace csbm {

using nlohmann::json;

namespace {

// Recursive-descent reader for the TOML subset described in the header.
class TomlReader {
 public:
  explicit TomlReader(std::string_view text) : s_(text) {}

  json parse() {
    json root = json::object();
    json* table = &root;
    for (;;) {
      skip_blank_lines();
      if (eof()) break;
      if (peek() == '[') {
        ++pos_;
        if (!eof() && peek() == '[') fail("arrays of tables are not supported");
        std::string name = read_until(']');
        ++pos_;
        table = &root;
        for (const std::string& part : split_key(name)) {
          json& next = (*table)[part];
          if (next.is_null()) next = json::object();
          if (!next.is_object()) fail("table '" + name + "' redefines a value");
          table = &next;
        }
      } else {
        const std::string key = read_key();
        skip_ws();
        expect('=');
        skip_ws();
        if (table->contains(key)) fail("duplicate key '" + key + "'");
        (*table)[key] = read_value();
      }
      end_of_line();
    }
    return root;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;
  int line_ = 1;

  [[noreturn]] void fail(const std::string& msg) const {
    std::ostringstream os;
    os << "TOML line " << line_ << ": " << msg;
    throw ConfigError(os.str());
  }

  bool eof() const { return pos_ >= s_.size(); }
  char peek() const { return s_[pos_]; }

  void expect(char c) {
    if (eof() || peek() != c) fail(std::string("expected '") + c + "'");
    ++pos_;
  }

  void skip_ws() {
    while (!eof() && (peek() == ' ' || peek() == '\t')) ++pos_;
  }

  void skip_comment() {
    if (!eof() && peek() == '#') {
      while (!eof() && peek() != '\n') ++pos_;
    }
  }

  // Whitespace, comments and newlines (used inside arrays and between statements).
  void skip_blank_lines() {
    for (;;) {
      skip_ws();
      skip_comment();
      if (!eof() && (peek() == '\n' || peek() == '\r')) {
        if (peek() == '\n') ++line_;
        ++pos_;
        continue;
      }
      return;
    }
  }

  void end_of_line() {
    skip_ws();
    skip_comment();
    if (eof()) return;
    if (peek() == '\r') ++pos_;
    if (eof()) return;
    if (peek() != '\n') fail("unexpected trailing characters");
    ++pos_;
    ++line_;
  }

  std::string read_until(char stop) {
    const std::size_t start = pos_;
    while (!eof() && peek() != stop && peek() != '\n') ++pos_;
    if (eof() || peek() != stop) fail(std::string("missing '") + stop + "'");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::vector<std::string> split_key(const std::string& name) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : name) {
      if (c == '.') {
        parts.push_back(trim(cur));
        cur.clear();
      } else {
        cur += c;
      }
    }
    parts.push_back(trim(cur));
    for (const auto& p : parts) {
      if (p.empty()) fail("empty table name component");
    }
    return parts;
  }

  static std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
  }

  static bool bare_key_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-';
  }

  std::string read_key() {
    skip_ws();
    if (!eof() && peek() == '"') return read_string();
    const std::size_t start = pos_;
    while (!eof() && bare_key_char(peek())) ++pos_;
    if (pos_ == start) fail("expected a key");
    return std::string(s_.substr(start, pos_ - start));
  }

  std::string read_string() {
    expect('"');
    std::string out;
    while (!eof() && peek() != '"') {
      char c = peek();
      if (c == '\n') fail("unterminated string");
      if (c == '\\') {
        ++pos_;
        if (eof()) fail("dangling escape");
        switch (peek()) {
          case 'n': out += '\n'; break;
          case 't': out += '\t'; break;
          case '"': out += '"'; break;
          case '\\': out += '\\'; break;
          default: fail("unsupported escape");
        }
      } else {
        out += c;
      }
      ++pos_;
    }
    expect('"');
    return out;
  }

  json read_value() {
    if (eof()) fail("missing value");
    const char c = peek();
    if (c == '"') return read_string();
    if (c == '[') return read_array();
    if (c == '{') return read_inline_table();
    return read_scalar();
  }

  json read_array() {
    expect('[');
    json arr = json::array();
    for (;;) {
      skip_blank_lines();
      if (eof()) fail("unterminated array");
      if (peek() == ']') {
        ++pos_;
        return arr;
      }
      arr.push_back(read_value());
      skip_blank_lines();
      if (!eof() && peek() == ',') {
        ++pos_;
        continue;
      }
      skip_blank_lines();
      expect(']');
      return arr;
    }
  }

  json read_inline_table() {
    expect('{');
    json obj = json::object();
    skip_ws();
    if (!eof() && peek() == '}') {
      ++pos_;
      return obj;
    }
    for (;;) {
      const std::string key = read_key();
      skip_ws();
      expect('=');
      skip_ws();
      obj[key] = read_value();
      skip_ws();
      if (!eof() && peek() == ',') {
        ++pos_;
        skip_ws();
        continue;
      }
      expect('}');
      return obj;
    }
  }

  json read_scalar() {
    const std::size_t start = pos_;
    while (!eof() && peek() != ',' && peek() != ']' && peek() != '}' && peek() != '\n' &&
           peek() != '#' && peek() != ' ' && peek() != '\t' && peek() != '\r') {
      ++pos_;
    }
    std::string tok(s_.substr(start, pos_ - start));
    if (tok == "true") return true;
    if (tok == "false") return false;
    if (tok == "inf" || tok == "+inf") return INFINITY;
    if (tok == "-inf") return -INFINITY;
    std::string digits;
    for (char ch : tok) {
      if (ch != '_') digits += ch;
    }
    if (digits.empty()) fail("empty value");
    const bool is_float = digits.find_first_of(".eE") != std::string::npos;
    if (!is_float) {
      std::int64_t v = 0;
      const char* first = digits.data() + (digits[0] == '+' ? 1 : 0);
      const auto [ptr, ec] = std::from_chars(first, digits.data() + digits.size(), v);
      if (ec == std::errc() && ptr == digits.data() + digits.size()) return v;
    }
    try {
      std::size_t used = 0;
      const double v = std::stod(digits, &used);
      if (used == digits.size()) return v;
    } catch (const std::exception&) {
    }
    fail("cannot parse value '" + tok + "'");
  }
};

double as_number(const json& j, std::string_view name) {
  if (!j.is_number()) throw ConfigError("'" + std::string(name) + "' must be a number");
  return j.get<double>();
}

int as_int(const json& j, std::string_view name) {
  const double v = as_number(j, name);
  if (v != std::floor(v) || std::abs(v) > 2e9) {
    throw ConfigError("'" + std::string(name) + "' must be an integer");
  }
  return static_cast<int>(v);
}

std::string as_string(const json& j, std::string_view name) {
  if (!j.is_string()) throw ConfigError("'" + std::string(name) + "' must be a string");
  return j.get<std::string>();
}

std::vector<double> linspace(double from, double to, int count) {
  if (count < 1) throw ConfigError("axis count must be >= 1");
  std::vector<double> v(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    v[static_cast<std::size_t>(k)] = count == 1 ? from : from + (to - from) * k / (count - 1);
  }
  return v;
}

std::vector<double> stepped(double from, double to, double step) {
  if (!(step > 0.0) || !(to >= from)) throw ConfigError("axis needs step > 0 and to >= from");
  const long count = std::lround(std::floor((to - from) / step + 1e-9)) + 1;
  if (count > 1000000) throw ConfigError("axis has too many points");
  std::vector<double> v;
  for (long k = 0; k < count; ++k) v.push_back(from + step * static_cast<double>(k));
  return v;
}

std::vector<int> int_axis(const std::vector<double>& v, std::string_view name) {
  std::vector<int> out;
  for (double x : v) out.push_back(as_int(json(x), name));
  return out;
}

std::uint64_t as_seed(const json& j) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return j.get<std::uint64_t>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size()) return v;
  }
  throw ConfigError("'base-seed' must be a nonnegative integer");
}

RhoPolicy rho_from_json(const json& j, std::string_view name) {
  if (j.is_number()) return {RhoPolicy::Kind::Explicit, j.get<double>()};
  return RhoPolicy::parse(as_string(j, name));
}

void apply_gcn(const json& g, ExperimentConfig& cfg) {
  if (!g.is_object()) throw ConfigError("'gcn' must be a table");
  for (const auto& [key, v] : g.items()) {
    if (key == "K") {
      cfg.gcn.K = as_int(v, key);
    } else if (key == "eta1") {
      cfg.gcn.eta1 = as_number(v, key);
    } else if (key == "lambda1") {
      cfg.gcn.lambda1 = as_number(v, key);
    } else if (key == "algorithm") {
      const std::string a = as_string(v, key);
      if (a == "two-step") {
        cfg.gcn_algorithm = GcnAlgorithm::TwoStep;
      } else if (a == "iterative") {
        cfg.gcn_algorithm = GcnAlgorithm::Iterative;
      } else {
        throw ConfigError("gcn.algorithm must be 'two-step' or 'iterative'");
      }
    } else if (key == "steps_stage2") {
      cfg.gcn.steps_stage2 = as_int(v, key);
    } else if (key == "eta_t") {
      cfg.gcn.eta_t = as_number(v, key);
    } else if (key == "lambda_t") {
      cfg.gcn.lambda_t = as_number(v, key);
    } else {
      throw ConfigError("unknown gcn key '" + key + "'");
    }
  }
}

void apply_grid(const json& g, GridSpec& grid) {
  if (!g.is_object()) throw ConfigError("'grid' must be a table");
  for (const auto& [key, v] : g.items()) {
    if (key == "a") {
      grid.a = axis_from_json(v, key);
    } else if (key == "b") {
      grid.b = axis_from_json(v, key);
    } else if (key == "c-tau") {
      grid.c_tau = axis_from_json(v, key);
    } else if (key == "tau") {
      grid.tau = axis_from_json(v, key);
    } else if (key == "n") {
      grid.N = int_axis(axis_from_json(v, key), key);
    } else if (key == "d") {
      grid.d = int_axis(axis_from_json(v, key), key);
    } else if (key == "q-m") {
      if (v.is_number()) {
        grid.q_m = QmRule::explicit_value(v.get<double>());
      } else {
        grid.q_m = qm_rule_from_string(as_string(v, key));
      }
    } else {
      throw ConfigError("unknown grid key '" + key + "'");
    }
  }
}

json axis_json(const std::vector<double>& v) { return json(v); }

}  // namespace

json parse_toml(std::string_view text) { return TomlReader(text).parse(); }

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  if (path.extension() == ".json") {
    try {
      return json::parse(buf.str());
    } catch (const json::parse_error& e) {
      throw ConfigError(std::string("malformed JSON config: ") + e.what());
    }
  }
  return parse_toml(buf.str());
}

std::string_view to_string(ExperimentKind k) {
  switch (k) {
    case ExperimentKind::PhaseDiagram: return "phase";
    case ExperimentKind::MismatchCurve: return "curve";
    case ExperimentKind::RiskSweep: return "risk";
    case ExperimentKind::SingleTrial: return "single";
  }
  return "unknown";
}

ExperimentKind kind_from_string(std::string_view s) {
  for (auto k : {ExperimentKind::PhaseDiagram, ExperimentKind::MismatchCurve,
                 ExperimentKind::RiskSweep, ExperimentKind::SingleTrial}) {
    if (to_string(k) == s) return k;
  }
  throw ConfigError("unknown experiment kind '" + std::string(s) + "'");
}

RhoPolicy RhoPolicy::parse(std::string_view s) {
  if (s == "zero") return {Kind::Zero, 0.0};
  if (s == "optimal") return {Kind::Optimal, 0.0};
  if (s == "trained") return {Kind::Trained, 0.0};
  const std::string str(s);
  try {
    std::size_t used = 0;
    const double v = std::stod(str, &used);
    if (used == str.size() && std::isfinite(v)) return {Kind::Explicit, v};
  } catch (const std::exception&) {
  }
  throw ConfigError("rho must be zero, optimal, trained or a number (got '" + str + "')");
}

std::string RhoPolicy::str() const {
  switch (kind) {
    case Kind::Zero: return "zero";
    case Kind::Optimal: return "optimal";
    case Kind::Trained: return "trained";
    case Kind::Explicit: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", value);
      return buf;
    }
  }
  return "zero";
}

int ExperimentConfig::effective_trials() const {
  if (trials > 0) return trials;
  return method == Method::Gcn ? 10 : 20;
}

void ExperimentConfig::validate() const {
  if (grid.a.empty() || grid.b.empty() || grid.c_tau.empty() || grid.tau.empty() ||
      grid.N.empty() || grid.d.empty()) {
    throw ConfigError("every grid axis needs at least one value (a and b are required)");
  }
  if (trials < 0) throw ConfigError("trials must be >= 1");
  if (lambda.empty()) throw ConfigError("lambda needs at least one value");
  for (double l : lambda) {
    if (!(l > 0.0)) throw ConfigError("lambda must be positive");
  }
  const auto check_rho = [&](const RhoPolicy& r) {
    if (r.kind == RhoPolicy::Kind::Trained && method != Method::Gcn) {
      throw ConfigError("rho = trained only applies to the gcn method");
    }
  };
  check_rho(rho);
  if (rho_baseline) check_rho(*rho_baseline);
  if (rho_baseline && method != Method::Lrr && method != Method::Gcn) {
    throw ConfigError("rho-baseline needs method lrr or gcn");
  }
  if (kind == ExperimentKind::RiskSweep && method != Method::Lrr) {
    throw ConfigError("risk sweeps require method = lrr");
  }
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("config root must be a table/object");
  ExperimentConfig cfg;
  bool explicit_trials = false;
  for (const auto& [key, v] : j.items()) {
    if (key == "kind") {
      cfg.kind = kind_from_string(as_string(v, key));
    } else if (key == "method") {
      cfg.method = method_from_string(as_string(v, key));
    } else if (key == "trials") {
      cfg.trials = as_int(v, key);
      explicit_trials = true;
    } else if (key == "base-seed") {
      cfg.base_seed = as_seed(v);
    } else if (key == "rho") {
      cfg.rho = rho_from_json(v, key);
    } else if (key == "rho-baseline") {
      cfg.rho_baseline = rho_from_json(v, key);
    } else if (key == "lambda") {
      cfg.lambda = axis_from_json(v, key);
    } else if (key == "out") {
      cfg.out = as_string(v, key);
    } else if (key == "grid") {
      apply_grid(v, cfg.grid);
    } else if (key == "gcn") {
      apply_gcn(v, cfg);
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  if (explicit_trials && cfg.trials < 1) throw ConfigError("trials must be >= 1");
  return cfg;
}

json config_to_json(const ExperimentConfig& cfg) {
  json j;
  j["kind"] = to_string(cfg.kind);
  j["method"] = to_string(cfg.method);
  j["trials"] = cfg.effective_trials();
  j["base-seed"] = cfg.base_seed;
  j["rho"] = cfg.rho.str();
  if (cfg.rho_baseline) j["rho-baseline"] = cfg.rho_baseline->str();
  j["lambda"] = axis_json(cfg.lambda);
  if (!cfg.out.empty()) j["out"] = cfg.out;
  json g;
  g["a"] = axis_json(cfg.grid.a);
  g["b"] = axis_json(cfg.grid.b);
  g["c-tau"] = axis_json(cfg.grid.c_tau);
  g["tau"] = axis_json(cfg.grid.tau);
  g["n"] = cfg.grid.N;
  g["d"] = cfg.grid.d;
  if (cfg.grid.q_m.kind == QmRule::Kind::LogM) {
    g["q-m"] = "log";
  } else {
    g["q-m"] = cfg.grid.q_m.value;
  }
  j["grid"] = g;
  if (cfg.method == Method::Gcn) {
    json gc;
    gc["K"] = cfg.gcn.K;
    gc["eta1"] = cfg.gcn.eta1;
    gc["lambda1"] = cfg.gcn.lambda1;
    gc["algorithm"] = cfg.gcn_algorithm == GcnAlgorithm::TwoStep ? "two-step" : "iterative";
    gc["steps_stage2"] = cfg.gcn.steps_stage2;
    gc["eta_t"] = cfg.gcn.eta_t;
    gc["lambda_t"] = cfg.gcn.lambda_t;
    j["gcn"] = gc;
  }
  return j;
}

std::vector<double> parse_axis(std::string_view text) {
  const std::string s(text);
  const auto num = [&](const std::string& tok) {
    try {
      std::size_t used = 0;
      const double v = std::stod(tok, &used);
      if (used == tok.size()) return v;
    } catch (const std::exception&) {
    }
    throw ConfigError("cannot parse axis value '" + tok + "' in '" + s + "'");
  };
  if (s.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string part;
    while (std::getline(ss, part, ':')) parts.push_back(part);
    if (parts.size() != 3) throw ConfigError("range axis must be from:to:count");
    const double count = num(parts[2]);
    if (count != std::floor(count)) throw ConfigError("range count must be an integer");
    return linspace(num(parts[0]), num(parts[1]), static_cast<int>(count));
  }
  std::vector<double> v;
  std::stringstream ss(s);
  std::string part;
  while (std::getline(ss, part, ',')) v.push_back(num(part));
  if (v.empty()) throw ConfigError("empty axis");
  return v;
}

std::vector<double> axis_from_json(const json& j, std::string_view name) {
  if (j.is_number()) return {j.get<double>()};
  if (j.is_string()) return parse_axis(j.get<std::string>());
  if (j.is_array()) {
    std::vector<double> v;
    for (const auto& x : j) v.push_back(as_number(x, name));
    return v;
  }
  if (j.is_object()) {
    if (j.contains("values")) return axis_from_json(j.at("values"), name);
    if (!j.contains("from") || !j.contains("to")) {
      throw ConfigError("axis '" + std::string(name) + "' needs values or from/to");
    }
    const double from = as_number(j.at("from"), name);
    const double to = as_number(j.at("to"), name);
    if (j.contains("count")) return linspace(from, to, as_int(j.at("count"), name));
    if (j.contains("step")) return stepped(from, to, as_number(j.at("step"), name));
    throw ConfigError("axis '" + std::string(name) + "' needs count or step");
  }
  throw ConfigError("axis '" + std::string(name) + "' has an unsupported type");
}

QmRule qm_rule_from_string(std::string_view s) {
  if (s == "log") return QmRule::log_m();
  const std::string str(s);
  try {
    std::size_t used = 0;
    const double v = std::stod(str, &used);
    if (used == str.size() && v > 0.0) return QmRule::explicit_value(v);
  } catch (const std::exception&) {
  }
  throw ConfigError("q-m must be 'log' or a positive number");
}

}  // namespace csbm
