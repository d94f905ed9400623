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

// Command-line front end: run, alpha-star, dac-of-competitive, check.
// Exit codes: 0 success, 1 solver failure or failed check, 2 invalid input.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "compctrl/bench.hpp"
#include "compctrl/competitive.hpp"
#include "compctrl/config.hpp"
#include "compctrl/dac.hpp"
#include "compctrl/errors.hpp"
#include "compctrl/suites.hpp"

namespace {

using namespace compctrl;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitInvalid = 2;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidConfig:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kIo:
      return kExitInvalid;
    default:
      return kExitFailure;
  }
}

int cmd_run(const std::string& config_path) {
  ExperimentConfig config = load_config(config_path);
  apply_environment(config);
  const ExperimentResult result = run_experiment(config, &std::cerr);
  emit_outputs(result.rows, config);

  bool failed = false;
  if (result.alpha_star) std::printf("alpha_star %.10g\n", *result.alpha_star);
  for (const ControllerSummary& s : result.summaries) {
    if (s.error) {
      failed = true;
      std::printf("%s trial %d error\n", s.controller.c_str(), s.trial);
      continue;
    }
    std::printf("%s trial %d total_cost %.10g", s.controller.c_str(), s.trial, s.total_cost);
    if (s.ratio) std::printf(" ratio %.10g", *s.ratio);
    std::printf("\n");
  }
  for (const auto& [name, ratio] : result.worst_ratio) {
    std::printf("%s worst_ratio %.10g\n", name.c_str(), ratio);
  }
  return failed ? kExitFailure : kExitOk;
}

int cmd_alpha_star(const std::string& system, double tol) {
  const LtiSystem sys = resolve_system(system);
  const CompetitiveSolution comp = compute_alpha_star(sys, tol);
  std::printf("%.10g\n", comp.alpha_star);
  return kExitOk;
}

int cmd_dac(const std::string& system, int H, const std::string& out) {
  const LtiSystem sys = resolve_system(system);
  const CompetitiveSolution comp = compute_alpha_star(sys);
  const DacPolicy policy = competitive_to_dac(sys, comp, H);
  save_policy(out, policy);
  std::printf("wrote %s (H=%d, theta=%.10g, gamma_prime=%.10g)\n", out.c_str(), policy.H,
              policy.theta, policy.gamma_prime);
  return kExitOk;
}

int cmd_check(const std::string& suite) {
  bool ok = true;
  for (const CheckResult& r : run_suite(suite)) {
    std::printf("[%s] %s: %s\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Competitive, H2, H-infinity and GPC controllers for linear dynamical systems"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment from a config file");
  run->add_option("--config", config_path, "Config file")->required();

  std::string system;
  double tol = 1e-4;
  auto* alpha = app.add_subcommand("alpha-star", "Print the optimal competitive ratio");
  alpha->add_option("--system", system, "Preset name or system file")->required();
  alpha->add_option("--tol", tol, "Relative bisection tolerance")->check(CLI::PositiveNumber);

  int horizon = 0;
  std::string out;
  auto* dac = app.add_subcommand("dac-of-competitive",
                                 "Write the DAC image of the competitive controller");
  dac->add_option("--system", system, "Preset name or system file")->required();
  dac->add_option("--horizon-H", horizon, "Memory length")->required()->check(CLI::PositiveNumber);
  dac->add_option("--out", out, "Output policy file")->required();

  std::string suite;
  auto* check = app.add_subcommand("check", "Run a property suite");
  check->add_option("--suite", suite, "bounds, regret or tail")
      ->required()
      ->check(CLI::IsMember({"bounds", "regret", "tail"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInvalid;
  }

  try {
    if (*run) return cmd_run(config_path);
    if (*alpha) return cmd_alpha_star(system, tol);
    if (*dac) return cmd_dac(system, horizon, out);
    if (*check) return cmd_check(suite);
  } catch (const Error& e) {
    std::cerr << "compctrl: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  return kExitInvalid;
}
