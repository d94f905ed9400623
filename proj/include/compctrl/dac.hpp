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

// Disturbance-action control (DAC):
//
//   u_t = K_stab x_t + sum_{i=1}^{H} M^[i-1] w_{t-i},
//
// with w_s = 0 for s < 1. An (H, theta, gamma') class additionally requires
// ||M^[i]|| <= theta (1 - gamma')^i.

#ifndef COMPCTRL_DAC_HPP
#define COMPCTRL_DAC_HPP

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

#include "compctrl/competitive.hpp"
#include "compctrl/lds_core.hpp"

namespace compctrl {

struct DacPolicy {
  Matrix K_stab;           // n x m
  std::vector<Matrix> M;   // H matrices, each n x m
  int H = 0;
  double theta = 1.0;
  double gamma_prime = 0.5;
};

// True when every ||M^[i]|| <= theta (1 - gamma')^i + slack.
bool in_class(const DacPolicy& policy, double slack = 1e-9);

// `history` holds w_{t-1}, w_{t-2}, ... (most recent first); entries past
// its end are zero.
Vector dac_action(const DacPolicy& policy, const Vector& x, std::span<const Vector> history);

// Runs a fixed DAC policy online, recovering each w_{t-1} from the states.
class DacController final : public Controller {
 public:
  DacController(const LtiSystem& sys, DacPolicy policy);
  Vector act(std::size_t t, const Vector& x) override;

 private:
  Matrix A_;
  Matrix B_;
  DacPolicy policy_;
  std::vector<Vector> history_;  // most recent first, length H
  Vector last_x_;
  Vector last_u_;
  std::size_t t_ = 0;
};

// DAC image of the competitive policy with K_stab = K_hat_0 and weights
// M^[i-1] = D F^{i-1}, D = K_hat_1 Sigma^{-1/2} Q^{1/2} - K_hat_0,
// F = A - K Q^{1/2}. theta = 2 kappa^2 max(1, beta^{1/2}) and
// gamma' = gamma use the audited constants. Throws
// kInternalInconsistency when a weight breaks the class bound.
DacPolicy competitive_to_dac(const LtiSystem& sys, const CompetitiveSolution& comp, int H);
DacPolicy competitive_to_dac(const LtiSystem& sys, const CompetitiveSolution& comp, int H,
                             const AssumptionAudit& audit);

// Constants used by the generalized conversion: the audit merged with the
// certificate of the chosen stabilizer.
struct GeneralConstants {
  StabilityCertificate stabilizer;
  double kappa = 1.0;
  double gamma = 0.5;
};

GeneralConstants general_constants(const LtiSystem& sys, const CompetitiveSolution& comp,
                                   const Matrix& K_stab);

// DAC image of the competitive policy for an arbitrary certified stabilizer:
//
//   M^[i-1] = D F^{i-1} + (K_hat_0 - K_stab) (G^{i-1} + sum_{j=1}^{i-1} G^{i-j-1} B D F^{j-1}),
//
// G = A + B K_hat_0. theta = 20 kappa^5 max(1, beta)^{1/2} / gamma and
// gamma' = gamma / 2.
DacPolicy competitive_to_dac_general(const LtiSystem& sys, const CompetitiveSolution& comp,
                                     const Matrix& K_stab, int H);

// ceil(log(1088 W^2 kappa^11 max(1, beta^2) T / (gamma^4 eps)) / log(1 / (1 - gamma/2))),
// at least 1. Throws kInvalidArgument for eps <= 0 or gamma outside (0, 1/2].
int horizon_for_epsilon(double eps, double W, double kappa, double gamma, double beta, double T);

// ceil(2 log(1e5 beta^2 W^2 kappa^16 T^5 / (gamma^4 eps)) / gamma), at least 1.
int horizon_for_epsilon_general(double eps, double W, double kappa, double gamma, double beta,
                                double T);

// 3 kappa^3 theta W / (gamma gamma'): envelope on ||x_t|| and ||u_t|| for any
// policy in the class.
double dac_state_bound(const DacPolicy& policy, double W, double kappa, double gamma);

// Per-step gap between the competitive policy and its H-term DAC image.
double state_gap_bound(double W, double kappa, double gamma, double q_norm, int H);
double action_gap_bound(double W, double kappa, double gamma, double q_norm, int H);

// Plain-text policy container, values at 17 significant digits:
//
//   compctrl-dac 1
//   dims <m> <n> <H>
//   theta <value>
//   gamma_prime <value>
//   K_stab
//   <n rows of m values>
//   M 0
//   <n rows of m values>
//   ...
void write_policy(std::ostream& out, const DacPolicy& policy);
DacPolicy read_policy(std::istream& in);
void save_policy(const std::filesystem::path& path, const DacPolicy& policy);
DacPolicy load_policy(const std::filesystem::path& path);

}  // namespace compctrl

#endif  // COMPCTRL_DAC_HPP
