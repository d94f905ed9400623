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

#ifndef COMPCTRL_BENCH_HPP
#define COMPCTRL_BENCH_HPP

#include <filesystem>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "compctrl/competitive.hpp"
#include "compctrl/config.hpp"
#include "compctrl/gpc.hpp"
#include "compctrl/lds_core.hpp"

namespace compctrl {

struct ResultRow {
  std::string controller;
  int trial = 0;
  std::size_t t = 0;  // 1-based; 0 marks an error row
  double cost = 0.0;
  double cum_cost = 0.0;
  std::optional<double> cum_ratio;  // omitted while the offline prefix is ~0
  std::optional<std::string> error;
};

struct ControllerSummary {
  std::string controller;
  int trial = 0;
  double total_cost = 0.0;
  std::optional<double> ratio;  // J_T / OPT_*
  std::optional<std::string> error;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;  // sorted by (controller order, trial, t)
  std::vector<ControllerSummary> summaries;
  std::optional<double> alpha_star;
  // Largest per-trial ratio for each controller; never mixed into the rows.
  std::vector<std::pair<std::string, double>> worst_ratio;
};

// Stabilizer, theta and gamma_prime for GPC. theta defaults to
// 2 kappa^2 max(1, beta^{1/2}) and gamma_prime to the stabilizer's gamma.
GpcConfig make_gpc_config(const LtiSystem& sys, const GpcSettings& settings,
                          const CompetitiveSolution* comp);

// Disturbances for one trial; stochastic kinds use seed + trial.
std::vector<Vector> trial_disturbances(const ExperimentConfig& config, int trial);

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

struct TailReport {
  double opt_cost = 0.0;
  double tail_cost = 0.0;
  double extended_cost = 0.0;
  double bound = 0.0;
  double final_state_norm = 0.0;
  std::size_t extension_steps = 0;
  bool passed = false;
};

TailReport tail_bound_check(const LtiSystem& sys, std::span<const Vector> w, const Matrix& K_stab,
                            double threshold = 1e-10);

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_trials_csv(std::ostream& out, const std::vector<ResultRow>& rows);
void write_svg(std::ostream& out, const std::vector<ResultRow>& rows);

// Writes csv_path, a companion "<stem>.trials.csv" when trials > 1, and the
// SVG when requested.
void emit_outputs(const std::vector<ResultRow>& rows, const ExperimentConfig& config);

std::filesystem::path trials_csv_path(const std::filesystem::path& csv_path);

}  // namespace compctrl

#endif  // COMPCTRL_BENCH_HPP
