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

// Experiment configuration: a plain-text `key = value` file. Lines starting
// with '#' are comments. Matrices are written as nested-bracket literals,
// e.g. `A = [[1, 1], [0, 1]]`, and may span several lines until the
// brackets balance.
//
// Keys (defaults in parentheses):
//   system           double_integrator | boeing_standin | inline (double_integrator)
//   A, B, Q, R       matrix literals; required for inline, override presets
//   W                disturbance bound (1)
//   noise            sin | sin_amplitude | constant | uniform | gaussian | gaussian_walk (sin)
//   noise_scale      (1)
//   per_entry_index  true | false (false)
//   T                horizon (1000)
//   seed             64-bit seed (0); COMPCTRL_SEED overrides it
//   trials           independent disturbance draws for stochastic noise (1)
//   controllers      comma list of h2, hinf, competitive, gpc, offline,
//                    dac_of_competitive (all)
//   gpc.H            memory (3)
//   gpc.eta          learning rate (0.002)
//   gpc.stabilizer   dare | competitive (dare)
//   gpc.schedule     constant | inv_sqrt (constant)
//   gpc.theta        projection radius (2 kappa^2 max(1, beta^{1/2}) of the stabilizer)
//   dac.H            memory of dac_of_competitive (from dac.eps)
//   dac.eps          target cost gap when dac.H is not given (1)
//   alpha_tol        bisection tolerance for alpha* (1e-4)
//   hinf_tol         H-infinity level slack (1e-3)
//   output.csv       CSV path (results.csv)
//   output.svg       SVG path (none)

#ifndef COMPCTRL_CONFIG_HPP
#define COMPCTRL_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "compctrl/gpc.hpp"
#include "compctrl/lds_core.hpp"
#include "compctrl/noise.hpp"

namespace compctrl {

enum class ControllerId { kH2, kHinf, kCompetitive, kGpc, kOffline, kDacOfCompetitive };

std::string_view to_string(ControllerId id);
ControllerId parse_controller_id(std::string_view name);  // throws kInvalidConfig
const std::vector<ControllerId>& all_controllers();

enum class GpcStabilizer { kDare, kCompetitive };

struct GpcSettings {
  int H = 3;
  double eta = 0.002;
  GpcStabilizer stabilizer = GpcStabilizer::kDare;
  StepSchedule schedule = StepSchedule::kConstant;
  std::optional<double> theta;
};

struct ExperimentConfig {
  std::string system_name = "double_integrator";
  LtiSystem system = double_integrator();
  NoiseSpec noise;
  std::size_t T = 1000;
  std::uint64_t seed = 0;
  int trials = 1;
  std::vector<ControllerId> controllers = all_controllers();
  GpcSettings gpc;
  std::optional<int> dac_H;
  double dac_eps = 1.0;
  double alpha_tol = 1e-4;
  double hinf_tol = 1e-3;
  std::filesystem::path csv_path = "results.csv";
  std::optional<std::filesystem::path> svg_path;
};

// Synthetic 5-state, 9-input plant with an open-loop spectral radius of
// about 1.02. It only mimics the shape of a flight-control benchmark.
LtiSystem boeing_standin();

// Resolves a preset name; throws kInvalidConfig for unknown names.
LtiSystem system_preset(std::string_view name);

// Parses a nested-bracket matrix literal; throws kInvalidConfig.
Matrix parse_matrix(std::string_view text);

// Throws kInvalidConfig on unknown keys, malformed values, or an invalid
// system. Does not read the environment.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Applies COMPCTRL_SEED when set.
void apply_environment(ExperimentConfig& config);

// `source` is either a preset name or the path of a config file whose system
// keys are used.
LtiSystem resolve_system(const std::string& source);

}  // namespace compctrl

#endif  // COMPCTRL_CONFIG_HPP
