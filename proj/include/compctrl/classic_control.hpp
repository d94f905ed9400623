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

// Baseline controllers: the H2 (LQR) gain from the discrete algebraic
// Riccati equation, a state-feedback H-infinity gain, and the clairvoyant
// offline optimum OPT_* over a known disturbance sequence.

#ifndef COMPCTRL_CLASSIC_CONTROL_HPP
#define COMPCTRL_CLASSIC_CONTROL_HPP

#include <span>
#include <vector>

#include "compctrl/lds_core.hpp"

namespace compctrl {

struct RiccatiSolution {
  Matrix P;  // m x m
  Matrix K;  // n x m, u = K x
  double residual = 0.0;
  int iterations = 0;
};

// Value iteration P <- Q + A'PA - A'PB (R + B'PB)^{-1} B'PA from P = Q,
// stopped at relative change < 1e-12 or 100000 sweeps.
// Throws kSolverFailed (with residual) when it does not converge to a
// stabilizing solution.
RiccatiSolution solve_dare(const LtiSystem& sys);

// The DARE map applied once; used for residual checks.
Matrix dare_map(const LtiSystem& sys, const Matrix& P);

struct HinfSettings {
  double gamma_lo = 1e-3;
  double gamma_hi = 1e6;
  int bisection_steps = 60;
};

struct HinfSolution {
  RiccatiSolution riccati;
  double gamma_attained = 0.0;  // level the returned gain was synthesized at
  double gamma_min = 0.0;       // smallest feasible level found by bisection
};

// Full-information H-infinity synthesis for w entering through the identity.
// For attenuation level g, iterate the game Riccati recursion
//
//   Lambda = P + P (g^2 I - P)^{-1} P
//   P     <- Q + A' Lambda A - A' Lambda B (R + B' Lambda B)^{-1} B' Lambda A
//
// from P = Q. A level is feasible when g^2 I - P stays positive definite on
// every sweep, the iteration converges, and the central gain
// K = -(R + B' Lambda B)^{-1} B' Lambda A is stabilizing. Bisection on a
// log scale over [gamma_lo, gamma_hi] finds the smallest feasible level
// gamma_min; the returned gain is synthesized at (1 + tol) * gamma_min.
HinfSolution solve_hinf(const LtiSystem& sys, double tol = 1e-3, const HinfSettings& settings = {});

// Evaluates one attenuation level; empty when infeasible.
std::optional<RiccatiSolution> hinf_at_level(const LtiSystem& sys, double level);

struct OfflineSolution {
  Trajectory trajectory;
  double opt_cost = 0.0;
};

// Exact minimizer of J_T = sum_{t=1}^T c(x_t, u_t) over all control
// sequences given the whole of w, by a backward Riccati recursion with an
// affine feedforward term and terminal value zero (x_{T+1} is costless).
OfflineSolution offline_optimal(const LtiSystem& sys, std::span<const Vector> w);

}  // namespace compctrl

#endif  // COMPCTRL_CLASSIC_CONTROL_HPP
