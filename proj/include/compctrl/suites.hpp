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

#ifndef COMPCTRL_SUITES_HPP
#define COMPCTRL_SUITES_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace compctrl {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

// Per-step state and action gaps between the competitive controller and its
// DAC image stay under their envelopes for H in {2, 4, 8, 16}, and shrink by
// at least 1.5x per doubling of H.
CheckResult check_truncation_envelopes(int runs = 10, std::uint64_t seed = 11);

// Rollouts of random class members stay within 3 kappa^3 theta W / (gamma gamma').
CheckResult check_dac_state_envelope(int policies = 20, int seeds = 5, std::uint64_t seed = 23);

// i (1-g)^i <= 2 (1-g/2)^i / g over a fixed grid.
CheckResult check_geometric_inequality();

// |J_T(DAC image) - J_T(competitive)| < eps with H from horizon_for_epsilon.
CheckResult check_cost_gap(const std::vector<double>& eps = {1.0, 0.1}, int runs = 10,
                           std::size_t T = 300, std::uint64_t seed = 37);

// Same, through the general-stabilizer construction with the DARE gain.
CheckResult check_general_cost_gap(double eps = 1.0, int runs = 3, std::size_t T = 300,
                                   std::uint64_t seed = 41);

// R(T)/T at T = 2000 is strictly below its value at T = 500 (sin noise).
CheckResult check_sublinear_regret();

// J(GPC) <= alpha* OPT_* (1 + slack(T)) with slack(T) = R(T) / (alpha* OPT_*),
// and slack(2000) < slack(500).
CheckResult check_best_of_both_worlds();

// tail_bound_check on random bounded-noise instances.
CheckResult check_tail(int instances = 10, std::size_t T = 100, std::uint64_t seed = 53);

// "bounds", "regret" or "tail"; throws kInvalidArgument otherwise.
std::vector<CheckResult> run_suite(std::string_view name);

}  // namespace compctrl

#endif  // COMPCTRL_SUITES_HPP
