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

// Gradient Perturbation Controller: online projected gradient descent on the
// weights of a DAC policy, driven by a truncated counterfactual loss, plus
// the best DAC policy in hindsight used to measure regret.

#ifndef COMPCTRL_GPC_HPP
#define COMPCTRL_GPC_HPP

#include <span>
#include <vector>

#include "compctrl/dac.hpp"
#include "compctrl/lds_core.hpp"

namespace compctrl {

enum class StepSchedule { kConstant, kInverseSqrt };

struct GpcConfig {
  int H = 3;
  double eta = 0.002;
  double theta = 1.0;
  double gamma_prime = 0.5;
  Matrix K_stab;  // n x m
  StepSchedule schedule = StepSchedule::kConstant;
};

// Throws kInvalidArgument unless eta >= 0, H >= 1, theta > 0 and
// gamma' in (0, 1).
void validate(const GpcConfig& config);

using Weights = std::vector<Matrix>;

// Loss of the ideal state: starting from zero H steps back, run the closed
// loop x <- A x + B (K_stab x + sum_i M^[i-1] w_{s-i}) + w_s under fixed M,
// and return c(y_t, v_t) at the final step. `window` holds the last 2H
// disturbances, most recent first (window[0] = w_{t-1}); missing entries
// are zero.
double surrogate_loss(const Weights& M, std::span<const Vector> window, const LtiSystem& sys,
                      const Matrix& K_stab);

// Exact gradient of surrogate_loss with respect to each M^[i], by reverse
// accumulation through the same H-step rollout.
Weights surrogate_gradient(const Weights& M, std::span<const Vector> window, const LtiSystem& sys,
                           const Matrix& K_stab);

// Rescales each M^[i] whose spectral norm exceeds theta (1 - gamma')^i back
// onto that radius.
Weights project(Weights M, double theta, double gamma_prime);

struct GpcState {
  Weights M;
  std::vector<Vector> w_buffer;  // last 2H disturbances, most recent first
  Vector last_x;
  Vector last_u;
  std::size_t t = 0;             // steps acted so far
  std::size_t updates = 0;
};

GpcState initial_state(const LtiSystem& sys, const GpcConfig& config);

// One projected gradient step on the surrogate at the current buffer.
// Throws kNumericDivergence when the gradient is not finite.
GpcState gpc_update(GpcState state, const LtiSystem& sys, const GpcConfig& config);

class GpcController final : public Controller {
 public:
  GpcController(const LtiSystem& sys, GpcConfig config);

  // Infers w_{t-1}, acts with the current weights, then takes one gradient
  // step before returning.
  Vector act(std::size_t t, const Vector& x) override;

  const GpcState& state() const { return state_; }
  const GpcConfig& config() const { return config_; }
  DacPolicy current_policy() const;

 private:
  LtiSystem sys_;
  GpcConfig config_;
  GpcState state_;
};

struct DacClass {
  int H = 3;
  double theta = 1.0;
  double gamma_prime = 0.5;
  Matrix K_stab;
};

struct HindsightResult {
  DacPolicy policy;
  double cost = 0.0;
  int iterations = 0;
  double projected_gradient_norm = 0.0;
};

// Minimizes the true J_T over the constrained class given all of w. States
// and actions are affine in the weights, so J_T is a convex quadratic; the
// unconstrained least-squares minimizer is used as a warm start and
// projected gradient descent (exact per-weight spectral-ball projection)
// runs until the projected-gradient norm is below 1e-8 relative to the
// gradient scale. Throws kSolverFailed after 100000 iterations.
HindsightResult best_dac_in_hindsight(const LtiSystem& sys, std::span<const Vector> w,
                                      const DacClass& cls);

// Euclidean projection of each weight onto its spectral-norm ball (singular
// values clipped).
Weights project_exact(Weights M, double theta, double gamma_prime);

}  // namespace compctrl

#endif  // COMPCTRL_GPC_HPP
