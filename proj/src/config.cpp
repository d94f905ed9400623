// Copyright 2026 The compctrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "compctrl/config.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "compctrl/errors.hpp"

namespace compctrl {
namespace {

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); }

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double d = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0') bad("'" + key + "' expects a number, got '" + v + "'");
  return d;
}

long long parse_integer(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const long long i = std::strtoll(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0') bad("'" + key + "' expects an integer, got '" + v + "'");
  return i;
}

std::uint64_t parse_seed(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const unsigned long long s = std::strtoull(v.c_str(), &end, 10);
  if (v.empty() || *end != '\0' || v.front() == '-') {
    bad("'" + key + "' expects an unsigned integer, got '" + v + "'");
  }
  return s;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad("'" + key + "' expects true or false, got '" + v + "'");
}

int bracket_depth(std::string_view s) {
  int depth = 0;
  for (char c : s) depth += (c == '[') - (c == ']');
  return depth;
}

class MatrixParser {
 public:
  explicit MatrixParser(std::string_view text) : s_(text) {}

  Matrix parse() {
    expect('[');
    std::vector<std::vector<double>> rows;
    skip_ws();
    if (peek() == '[') {
      do {
        rows.push_back(parse_row());
        skip_ws();
      } while (consume(','));
    } else {
      rows.push_back(parse_numbers());
    }
    expect(']');
    skip_ws();
    if (pos_ != s_.size()) bad("trailing characters after matrix literal");
    const std::size_t cols = rows.front().size();
    if (cols == 0) bad("empty matrix row");
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t r = 0; r < rows.size(); ++r) {
      if (rows[r].size() != cols) bad("matrix rows have different lengths");
      for (std::size_t c = 0; c < cols; ++c) m(r, c) = rows[r][c];
    }
    return m;
  }

 private:
  std::vector<double> parse_row() {
    expect('[');
    std::vector<double> row = parse_numbers();
    expect(']');
    return row;
  }

  std::vector<double> parse_numbers() {
    std::vector<double> out;
    do {
      skip_ws();
      const std::string rest(s_.substr(pos_));
      char* end = nullptr;
      const double v = std::strtod(rest.c_str(), &end);
      if (end == rest.c_str()) bad("expected a number in matrix literal");
      pos_ += static_cast<std::size_t>(end - rest.c_str());
      out.push_back(v);
      skip_ws();
    } while (consume(','));
    return out;
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  char peek() const { return pos_ < s_.size() ? s_[pos_] : '\0'; }
  bool consume(char c) {
    skip_ws();
    if (peek() != c) return false;
    ++pos_;
    return true;
  }
  void expect(char c) {
    if (!consume(c)) bad(std::string("expected '") + c + "' in matrix literal");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

std::map<std::string, std::string> parse_pairs(std::string_view text) {
  std::map<std::string, std::string> pairs;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) bad("line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    while (bracket_depth(value) > 0) {
      std::string more;
      if (!std::getline(in, more)) bad("unterminated matrix literal for '" + key + "'");
      ++line_no;
      const auto h = more.find('#');
      if (h != std::string::npos) more.erase(h);
      value += " " + trim(more);
    }
    if (key.empty()) bad("line " + std::to_string(line_no) + ": empty key");
    if (pairs.count(key)) bad("duplicate key '" + key + "'");
    pairs[key] = value;
  }
  return pairs;
}

LtiSystem system_from_pairs(std::map<std::string, std::string>& pairs, std::string& name) {
  auto take = [&](const std::string& key) -> std::optional<std::string> {
    auto it = pairs.find(key);
    if (it == pairs.end()) return std::nullopt;
    std::string v = it->second;
    pairs.erase(it);
    return v;
  };
  name = take("system").value_or("double_integrator");
  auto A = take("A");
  auto B = take("B");
  auto Q = take("Q");
  auto R = take("R");
  auto W = take("W");

  LtiSystem base;
  if (name == "inline") {
    if (!A || !B) bad("system = inline requires A and B");
    const Matrix a = parse_matrix(*A);
    const Matrix b = parse_matrix(*B);
    base.A = a;
    base.B = b;
    base.Q = Matrix::Identity(a.rows(), a.rows());
    base.R = Matrix::Identity(b.cols(), b.cols());
    base.W = 1.0;
  } else {
    base = system_preset(name);
    if (A) base.A = parse_matrix(*A);
    if (B) base.B = parse_matrix(*B);
  }
  if (Q) base.Q = parse_matrix(*Q);
  if (R) base.R = parse_matrix(*R);
  if (W) base.W = parse_double("W", *W);
  try {
    return make_system(base.A, base.B, base.Q, base.R, base.W);
  } catch (const Error& e) {
    bad(std::string("invalid system: ") + e.what());
  }
}

}  // namespace

std::string_view to_string(ControllerId id) {
  switch (id) {
    case ControllerId::kH2: return "h2";
    case ControllerId::kHinf: return "hinf";
    case ControllerId::kCompetitive: return "competitive";
    case ControllerId::kGpc: return "gpc";
    case ControllerId::kOffline: return "offline";
    case ControllerId::kDacOfCompetitive: return "dac_of_competitive";
  }
  return "unknown";
}

ControllerId parse_controller_id(std::string_view name) {
  for (ControllerId id : all_controllers()) {
    if (to_string(id) == name) return id;
  }
  bad("unknown controller '" + std::string(name) + "'");
}

const std::vector<ControllerId>& all_controllers() {
  static const std::vector<ControllerId> ids = {
      ControllerId::kH2,  ControllerId::kHinf,    ControllerId::kCompetitive,
      ControllerId::kGpc, ControllerId::kOffline, ControllerId::kDacOfCompetitive};
  return ids;
}

LtiSystem boeing_standin() {
  Matrix A(5, 5);
  A << -0.0329, -0.3282, -0.3767, 0.5140, -0.0050,
       -0.2177, -0.0185, -1.2523, -0.3933, -0.7370,
        0.2171, -0.1873,  0.4571,  0.1820, -0.5849,
        0.0786, -0.3386, -0.0692,  0.0972, -0.3304,
        0.3795,  0.0936, -0.0144, -0.6716, -0.2213;
  Matrix B(5, 9);
  B << -0.2424, 0.3131,  0.7780,  0.0225, -0.7253, -0.4075,  0.3015, -0.3200,  0.9060,
       -0.5162, 0.2807,  0.0065, -0.1684, -0.1508, -0.1992,  0.2456, -0.2543,  0.0208,
       -0.2550, 0.6063,  0.3540,  0.0996, -0.1511, -0.2358,  0.1727, -0.1468, -0.0118,
       -0.2084, 0.3386,  0.1759,  0.0575,  0.2873, -0.1393, -0.1382,  0.2760,  0.0129,
        0.1529, 0.0153, -0.0170, -0.5109, -0.0478, -0.4742, -0.4198, -0.2803,  0.6547;
  return make_system(A, B, Matrix::Identity(5, 5), Matrix::Identity(9, 9), 1.0);
}

LtiSystem system_preset(std::string_view name) {
  if (name == "double_integrator") return double_integrator();
  if (name == "boeing_standin") return boeing_standin();
  bad("unknown system preset '" + std::string(name) + "'");
}

Matrix parse_matrix(std::string_view text) { return MatrixParser(text).parse(); }

ExperimentConfig parse_config(std::string_view text) {
  auto pairs = parse_pairs(text);
  ExperimentConfig c;
  c.system = system_from_pairs(pairs, c.system_name);

  for (const auto& [key, v] : pairs) {
    if (key == "noise") {
      try {
        c.noise.kind = parse_noise_kind(v);
      } catch (const Error& e) {
        bad(e.what());
      }
    } else if (key == "noise_scale") {
      c.noise.scale = parse_double(key, v);
    } else if (key == "per_entry_index") {
      c.noise.per_entry_index = parse_bool(key, v);
    } else if (key == "T") {
      const long long T = parse_integer(key, v);
      if (T < 1) bad("T must be at least 1");
      c.T = static_cast<std::size_t>(T);
    } else if (key == "seed") {
      c.seed = parse_seed(key, v);
    } else if (key == "trials") {
      c.trials = static_cast<int>(parse_integer(key, v));
      if (c.trials < 1) bad("trials must be at least 1");
    } else if (key == "controllers") {
      c.controllers.clear();
      std::stringstream ss(v);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const std::string name = trim(item);
        if (name.empty()) continue;
        const ControllerId id = parse_controller_id(name);
        if (std::find(c.controllers.begin(), c.controllers.end(), id) == c.controllers.end()) {
          c.controllers.push_back(id);
        }
      }
      if (c.controllers.empty()) bad("at least one controller is required");
    } else if (key == "gpc.H") {
      c.gpc.H = static_cast<int>(parse_integer(key, v));
      if (c.gpc.H < 1) bad("gpc.H must be at least 1");
    } else if (key == "gpc.eta") {
      c.gpc.eta = parse_double(key, v);
      if (c.gpc.eta < 0.0) bad("gpc.eta must be nonnegative");
    } else if (key == "gpc.stabilizer") {
      if (v == "dare") {
        c.gpc.stabilizer = GpcStabilizer::kDare;
      } else if (v == "competitive") {
        c.gpc.stabilizer = GpcStabilizer::kCompetitive;
      } else {
        bad("gpc.stabilizer must be dare or competitive");
      }
    } else if (key == "gpc.schedule") {
      if (v == "constant") {
        c.gpc.schedule = StepSchedule::kConstant;
      } else if (v == "inv_sqrt") {
        c.gpc.schedule = StepSchedule::kInverseSqrt;
      } else {
        bad("gpc.schedule must be constant or inv_sqrt");
      }
    } else if (key == "gpc.theta") {
      c.gpc.theta = parse_double(key, v);
      if (!(*c.gpc.theta > 0.0)) bad("gpc.theta must be positive");
    } else if (key == "dac.H") {
      c.dac_H = static_cast<int>(parse_integer(key, v));
      if (*c.dac_H < 1) bad("dac.H must be at least 1");
    } else if (key == "dac.eps") {
      c.dac_eps = parse_double(key, v);
      if (!(c.dac_eps > 0.0)) bad("dac.eps must be positive");
    } else if (key == "alpha_tol") {
      c.alpha_tol = parse_double(key, v);
      if (!(c.alpha_tol > 0.0)) bad("alpha_tol must be positive");
    } else if (key == "hinf_tol") {
      c.hinf_tol = parse_double(key, v);
      if (!(c.hinf_tol > 0.0)) bad("hinf_tol must be positive");
    } else if (key == "output.csv") {
      c.csv_path = v;
    } else if (key == "output.svg") {
      c.svg_path = v;
    } else {
      bad("unknown key '" + key + "'");
    }
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

void apply_environment(ExperimentConfig& config) {
  if (const char* s = std::getenv("COMPCTRL_SEED"); s != nullptr && *s != '\0') {
    config.seed = parse_seed("COMPCTRL_SEED", s);
  }
}

LtiSystem resolve_system(const std::string& source) {
  if (source == "double_integrator" || source == "boeing_standin") return system_preset(source);
  if (!std::filesystem::exists(source)) bad("'" + source + "' is neither a preset nor a readable file");
  std::ifstream in(source);
  std::stringstream ss;
  ss << in.rdbuf();
  auto pairs = parse_pairs(ss.str());
  std::string name;
  return system_from_pairs(pairs, name);
}

}  // namespace compctrl
