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

// Linear time-invariant plant x_{t+1} = A x_t + B u_t + w_t with quadratic
// stage cost c(x, u) = x'Qx + u'Ru, plus closed-loop simulation and
// (kappa, gamma) strong-stability certificates.

#ifndef COMPCTRL_LDS_CORE_HPP
#define COMPCTRL_LDS_CORE_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "compctrl/linalg.hpp"

namespace compctrl {

struct LtiSystem {
  Matrix A;  // m x m
  Matrix B;  // m x n
  Matrix Q;  // m x m, symmetric PSD
  Matrix R;  // n x n, symmetric PD
  double W = 1.0;     // disturbance norm bound, advisory during simulation
  double beta = 1.0;  // upper bound on the spectra of Q and R
  double mu = 1.0;    // lower bound on the spectrum of R

  Eigen::Index state_dim() const { return A.rows(); }
  Eigen::Index input_dim() const { return B.cols(); }
};

// Validates shapes, symmetry and definiteness, and derives beta and mu from
// the spectra of Q and R. When `kappa` is given, also checks
// ||A||, ||B|| <= kappa. Throws Error(kInvalidArgument).
LtiSystem make_system(Matrix A, Matrix B, Matrix Q, Matrix R, double W = 1.0,
                      std::optional<double> kappa = std::nullopt);

// The 2-state double integrator with Q = I, R = I, W = 1.
LtiSystem double_integrator();

Vector step(const LtiSystem& sys, const Vector& x, const Vector& u, const Vector& w);

double cost(const LtiSystem& sys, const Vector& x, const Vector& u);

// A strictly causal policy. `act` is called exactly once per step, in order,
// with the 0-based step index and the state observed at that step.
class Controller {
 public:
  virtual ~Controller() = default;
  virtual Vector act(std::size_t t, const Vector& x) = 0;
};

class LinearController final : public Controller {
 public:
  explicit LinearController(Matrix K) : K_(std::move(K)) {}
  Vector act(std::size_t t, const Vector& x) override;

 private:
  Matrix K_;
};

// Replays a precomputed control sequence, ignoring the observed state.
class OpenLoopController final : public Controller {
 public:
  explicit OpenLoopController(std::vector<Vector> controls) : controls_(std::move(controls)) {}
  Vector act(std::size_t t, const Vector& x) override;

 private:
  std::vector<Vector> controls_;
};

struct Trajectory {
  std::vector<Vector> states;        // x_1 .. x_{T+1}, x_1 = 0
  std::vector<Vector> controls;      // u_1 .. u_T
  std::vector<Vector> disturbances;  // w_1 .. w_T
  std::vector<double> step_costs;    // c(x_t, u_t)
  double total_cost = 0.0;
  // Set when some ||w_t|| exceeded the system's W.
  bool disturbance_bound_exceeded = false;

  std::size_t horizon() const { return controls.size(); }
};

// Simulates T = w.size() steps from x_1 = 0. Throws kInvalidArgument on a
// wrong-sized action and kNumericDivergence (with step index) when the state
// stops being finite.
Trajectory rollout(const LtiSystem& sys, Controller& controller, std::span<const Vector> w);

struct StabilityCertificate {
  ComplexMatrix S;  // A + BK = S L S^{-1}
  ComplexMatrix L;
  double kappa = 1.0;
  double gamma = 0.5;
};

// Certifies u = Kx for x_{t+1} = A x + B u. S holds unit-norm eigenvectors
// of A + BK and L the eigenvalues. kappa = max{1, ||K||, cond(S)} rounded up
// to a multiple of 1e-12, gamma = 1 - max{1/2, ||L||}.
// Throws kNotStable when the spectral radius is >= 1 and
// kCertificationFailed when cond(S) > 1e8.
StabilityCertificate stability_certificate(const Matrix& A, const Matrix& B, const Matrix& K);
StabilityCertificate stability_certificate(const LtiSystem& sys, const Matrix& K);

// Same, with a caller-supplied similarity (S, L) in place of the
// eigendecomposition. The reconstruction S L S^{-1} = A + BK is verified.
StabilityCertificate stability_certificate(const Matrix& A, const Matrix& B, const Matrix& K,
                                           const ComplexMatrix& S, const ComplexMatrix& L);

inline constexpr double kMaxEigenbasisCondition = 1e8;

}  // namespace compctrl

#endif  // COMPCTRL_LDS_CORE_HPP
