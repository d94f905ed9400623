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

// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include "compctrl/bench.hpp"
#include "compctrl/classic_control.hpp"
#include "compctrl/config.hpp"
#include "compctrl/gpc.hpp"
#include "compctrl/suites.hpp"
#include "oracles.hpp"

#ifndef COMPCTRL_CLI_PATH
#error "COMPCTRL_CLI_PATH must name the compctrl executable"
#endif

using namespace compctrl;

namespace {

struct Outcome {
  bool passed = false;
  std::string detail;
};

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

std::pair<int, std::string> run_command(const std::string& cmd) {
  std::string out;
  FILE* pipe = ::popen(cmd.c_str(), "r");
  if (!pipe) return {-1, out};
  std::array<char, 256> buf{};
  while (std::fgets(buf.data(), static_cast<int>(buf.size()), pipe)) out += buf.data();
  const int status = ::pclose(pipe);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome from_check(const CheckResult& r) { return {r.passed, r.detail}; }

Outcome alpha_star_cli() {
  const auto [code, out] = run_command(std::string(COMPCTRL_CLI_PATH) + " alpha-star --system double_integrator");
  if (code != 0) return {false, format("exit code %d", code)};
  const double v = std::strtod(out.c_str(), nullptr);
  return {std::abs(v - 14.67) <= 0.05, format("printed %.6f", v)};
}

Outcome offline_oracle() {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> dim(1, 3), len(1, 8);
  std::normal_distribution<double> g;
  double worst = 0.0;
  int beaten = 0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index m = dim(rng), n = dim(rng);
    const std::size_t T = static_cast<std::size_t>(len(rng));
    const LtiSystem sys = make_system(oracle::random_matrix(rng, m, m, 0.6), oracle::random_matrix(rng, m, n),
                                      oracle::random_spd(rng, m), oracle::random_spd(rng, n, 0.5));
    const auto w = oracle::random_ball(rng, T, m, 1.0);
    const double opt = offline_optimal(sys, w).opt_cost;
    const double ref = oracle::kkt_offline(sys, w).cost;
    worst = std::max(worst, std::abs(opt - ref));
    bool beats_all = true;
    for (int s = 0; s < 1000; ++s) {
      std::vector<Vector> u;
      for (std::size_t t = 0; t < T; ++t) u.push_back(oracle::random_matrix(rng, n, 1));
      if (oracle::open_loop_cost(sys, u, w) < opt) beats_all = false;
    }
    beaten += beats_all;
  }
  return {worst <= 1e-8 && beaten == 100,
          format("max |OPT - KKT| = %.3e, beat 1000 random sequences in %d/100", worst, beaten)};
}

Outcome gradient_check() {
  std::mt19937_64 rng(77);
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::Index m = 1 + k % 3, n = 1 + (k / 3) % 3;
    const int H = 1 + k % 5;
    const LtiSystem sys = make_system(oracle::random_matrix(rng, m, m, 0.5), oracle::random_matrix(rng, m, n),
                                      oracle::random_spd(rng, m), oracle::random_spd(rng, n, 0.5));
    const Matrix K = oracle::random_matrix(rng, n, m, 0.3);
    Weights M;
    for (int i = 0; i < H; ++i) M.push_back(oracle::random_matrix(rng, n, m));
    const auto window = oracle::random_ball(rng, 2 * static_cast<std::size_t>(H), m, 1.0);
    const Weights grad = surrogate_gradient(M, window, sys, K);
    double scale = 1.0, err = 0.0;
    const double h = 1e-6;
    for (int i = 0; i < H; ++i) {
      scale = std::max(scale, grad[i].cwiseAbs().maxCoeff());
      for (Eigen::Index r = 0; r < n; ++r) {
        for (Eigen::Index c = 0; c < m; ++c) {
          Weights plus = M, minus = M;
          plus[i](r, c) += h;
          minus[i](r, c) -= h;
          const double fd = (surrogate_loss(plus, window, sys, K) - surrogate_loss(minus, window, sys, K)) / (2 * h);
          err = std::max(err, std::abs(fd - grad[i](r, c)));
        }
      }
    }
    worst = std::max(worst, err / scale);
  }
  return {worst <= 1e-5, format("worst relative error %.3e over 100 cases", worst)};
}

Outcome figure_one() {
  struct Case {
    NoiseKind kind;
    double eta;
  };
  const Case cases[] = {{NoiseKind::kSin, 0.002},
                        {NoiseKind::kConstant, 0.002},
                        {NoiseKind::kGaussian, 0.002},
                        {NoiseKind::kGaussianWalk, 1e-4}};
  const auto dir = std::filesystem::temp_directory_path() / "compctrl_acceptance_fig";
  std::filesystem::create_directories(dir);
  bool ok = true;
  std::string detail;
  for (const Case& c : cases) {
    ExperimentConfig cfg;
    cfg.T = 1000;
    cfg.seed = 1;
    cfg.noise.kind = c.kind;
    cfg.gpc.eta = c.eta;
    cfg.controllers = {ControllerId::kH2, ControllerId::kCompetitive, ControllerId::kGpc, ControllerId::kOffline};
    const std::string name(to_string(c.kind));
    cfg.csv_path = dir / (name + ".csv");
    cfg.svg_path = dir / (name + ".svg");
    const ExperimentResult r = run_experiment(cfg);
    emit_outputs(r.rows, cfg);
    double gpc = NAN, comp = NAN;
    for (const ControllerSummary& s : r.summaries) {
      if (s.controller == "gpc") gpc = s.total_cost;
      if (s.controller == "competitive") comp = s.total_cost;
    }
    const double ratio = gpc / comp;
    if (!(ratio <= 1.1) || !std::filesystem::exists(*cfg.svg_path)) ok = false;
    detail += format("%s gpc/competitive=%.3f; ", name.c_str(), ratio);
  }
  std::filesystem::remove_all(dir);
  return {ok, detail};
}

Outcome determinism() {
  const auto dir = std::filesystem::temp_directory_path() / "compctrl_acceptance_det";
  std::filesystem::create_directories(dir);
  std::string texts[2];
  for (int k = 0; k < 2; ++k) {
    const auto cfg = dir / ("run" + std::to_string(k) + ".cfg");
    const auto csv = dir / ("run" + std::to_string(k) + ".csv");
    std::ofstream(cfg) << "noise = gaussian\nseed = 31337\nT = 300\ntrials = 2\noutput.csv = " << csv.string() << "\n";
    const auto [code, out] = run_command(std::string(COMPCTRL_CLI_PATH) + " run --config " + cfg.string());
    if (code != 0) {
      std::filesystem::remove_all(dir);
      return {false, format("run %d exited with %d", k, code)};
    }
    texts[k] = slurp(csv);
  }
  std::filesystem::remove_all(dir);
  return {!texts[0].empty() && texts[0] == texts[1], format("%zu bytes per CSV", texts[0].size())};
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;  // 0 means no runtime requirement
  std::function<Outcome()> run;
};

}  // namespace

int main() {
  const Criterion criteria[] = {
      {1, "optimal competitive ratio via CLI", 10.0, alpha_star_cli},
      {2, "DAC image cost gap", 30.0, [] { return from_check(check_cost_gap({1.0, 0.1}, 10, 300)); }},
      {3, "truncation envelopes", 0.0, [] { return from_check(check_truncation_envelopes(10)); }},
      {4, "DAC state envelope", 0.0, [] { return from_check(check_dac_state_envelope(20, 5)); }},
      {5, "geometric inequality", 0.0, [] { return from_check(check_geometric_inequality()); }},
      {6, "offline optimum vs KKT oracle", 0.0, offline_oracle},
      {7, "surrogate gradient check", 0.0, gradient_check},
      {8, "sublinear regret", 60.0, [] { return from_check(check_sublinear_regret()); }},
      {9, "tail bound", 0.0, [] { return from_check(check_tail(10, 100)); }},
      {10, "GPC vs competitive curves", 0.0, figure_one},
      {11, "byte-identical reruns", 0.0, determinism},
  };
  int failures = 0;
  for (const Criterion& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_s > 0.0 && secs >= c.budget_s) {
      o.passed = false;
      o.detail += format(" [over the %.0f s budget]", c.budget_s);
    }
    failures += !o.passed;
    std::printf("[%s] criterion %d (%s): %s (%.2f s)\n", o.passed ? "PASS" : "FAIL", c.id, c.name,
                o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(std::size(criteria)) - failures, std::size(criteria));
  return failures == 0 ? 0 : 1;
}
