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

// The optimal competitive controller for an LTI system.
//
// Given the plant (A, B) and stage cost (Q, R), the controller is a static
// state-feedback law u_t = K_hat xi_t on a 2m-dimensional synthetic state
//
//   xi_t = [x_t - nu_t; Sigma^{-1/2} Q^{1/2} nu_t],
//   nu_{t+1} = (A - K Q^{1/2}) nu_t + w_t,  nu_1 = 0,
//
// where (P, K, Sigma) solve the filtering equations
//
//   Sigma = I + Q^{1/2} P Q^{1/2},  K = A P Q^{1/2} Sigma^{-1},
//   P = B B' + A P A' - K Sigma K',
//
// and K_hat comes from a game Riccati equation on the synthetic system at
// the optimal competitive ratio alpha*. alpha* is the smallest level at
// which that equation admits a solution with -alpha I + Bw' P_hat Bw < 0.
//
// The equations are stated for R = I. A general R is handled by solving in
// normalized inputs u' = R^{1/2} u (so B becomes B R^{-1/2}) and mapping the
// gain back; every matrix below except K_hat is in normalized coordinates.

#ifndef COMPCTRL_COMPETITIVE_HPP
#define COMPCTRL_COMPETITIVE_HPP

#include <optional>

#include "compctrl/lds_core.hpp"

namespace compctrl {

struct FilterSolution {
  Matrix P;      // m x m
  Matrix K;      // m x m
  Matrix Sigma;  // m x m, Sigma >= I
  Matrix Q_sqrt;
  Matrix Sigma_sqrt;
  Matrix Sigma_inv_sqrt;
  double residual = 0.0;
  int iterations = 0;
};

FilterSolution solve_filter(const LtiSystem& sys);

// Synthetic-system matrices that do not depend on alpha.
struct SyntheticSystem {
  Matrix A_hat;    // 2m x 2m, [[A, K Sigma^{1/2}], [0, 0]]
  Matrix B_hat_u;  // 2m x n,  [B R^{-1/2}; 0]
  Matrix B_hat_w;  // 2m x m,  [0; I]
  Matrix cost;     // 2m x 2m, [[Q, Q^{1/2} Sigma^{1/2}], [Sigma^{1/2} Q^{1/2}, Sigma]]
};

SyntheticSystem synthetic_system(const LtiSystem& sys, const FilterSolution& filter);

struct PhatResult {
  Matrix P_hat;
  int iterations = 0;
  double residual = 0.0;
};

// Fixed point of the P_hat equation at level alpha, iterated from the
// synthetic cost matrix. Empty (infeasible) when -alpha I + Bw' P_hat Bw is
// not negative definite with margin 1e-10 on some sweep, when H_tilde has
// condition number above 1e12, or when the iteration diverges (norm > 1e12)
// or fails to converge within 100000 sweeps. Throws kSolverFailed only on
// non-finite arithmetic.
std::optional<PhatResult> solve_phat(const LtiSystem& sys, const FilterSolution& filter, double alpha);

struct CompetitiveSolution {
  FilterSolution filter;
  Matrix A_hat;
  Matrix B_hat_u;
  Matrix B_hat_w;
  Matrix P_hat;
  Matrix P_tilde;
  Matrix H_tilde;  // (n+m) x (n+m)
  Matrix K_hat;    // n x 2m, in the original input coordinates
  Matrix K_hat_0;  // first m columns of K_hat
  Matrix K_hat_1;  // last m columns of K_hat
  Matrix R_inv_sqrt;
  double alpha_star = 0.0;
  double phat_residual = 0.0;
};

// Bisection on alpha over [1 + 1e-6, 1e6] (geometric midpoints) down to
// multiplicative width `tol`; assembles the solution at the smallest
// feasible level found. Throws kSolverFailed when the upper end is
// infeasible or the resulting controller is not stabilizing.
CompetitiveSolution compute_alpha_star(const LtiSystem& sys, double tol = 1e-4);

// Assembles P_tilde, H_tilde and K_hat at a feasible level.
CompetitiveSolution assemble_competitive(const LtiSystem& sys, const FilterSolution& filter,
                                         double alpha);

// D = K_hat_1 Sigma^{-1/2} Q^{1/2} - K_hat_0, the gain applied to nu_t.
Matrix disturbance_gain(const CompetitiveSolution& comp);

// F = A - K Q^{1/2}, the filter dynamics driving nu_t.
Matrix filter_dynamics(const LtiSystem& sys, const CompetitiveSolution& comp);

// Strong-stability audit of a competitive solution: certificates for K_hat_0
// on (A, B) and for -K' on (A', Q^{1/2}), merged into one (kappa, gamma)
// pair. kappa also covers ||K_hat||, ||A|| and ||B|| so that every bound
// derived from it is self-contained; gamma is the smaller of the two.
struct AssumptionAudit {
  StabilityCertificate closed_loop;
  StabilityCertificate filter;
  double kappa = 1.0;
  double gamma = 0.5;
};

AssumptionAudit audit_assumption(const LtiSystem& sys, const CompetitiveSolution& comp);

// Runs the competitive policy online. The disturbance w_{t-1} is recovered
// from consecutive states, so only the observed state is needed.
class CompetitiveRuntime final : public Controller {
 public:
  CompetitiveRuntime(const LtiSystem& sys, CompetitiveSolution solution);

  // Throws kProtocolViolation unless t is exactly the next step.
  Vector act(std::size_t t, const Vector& x) override;

  const CompetitiveSolution& solution() const { return solution_; }
  const Vector& nu() const { return nu_; }
  // Synthetic state propagated through (A_hat, B_hat_u, B_hat_w).
  const Vector& synthetic_state() const { return xi_; }
  // [x_t - nu_t; Sigma^{-1/2} Q^{1/2} nu_t] rebuilt from the current step.
  Vector expected_synthetic_state() const;
  // Disturbance inferred on the latest call (zero at t = 0).
  const Vector& last_inferred_disturbance() const { return w_inferred_; }
  std::size_t steps_taken() const { return t_; }

 private:
  Matrix A_;
  Matrix B_;
  Matrix filter_dyn_;
  Matrix w_hat_map_;  // Sigma^{-1/2} Q^{1/2}
  CompetitiveSolution solution_;
  Vector nu_;
  Vector xi_;
  Vector last_x_;
  Vector last_u_;
  Vector w_inferred_;
  std::size_t t_ = 0;
};

}  // namespace compctrl

#endif  // COMPCTRL_COMPETITIVE_HPP
