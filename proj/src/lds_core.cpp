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

#include "compctrl/lds_core.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "compctrl/errors.hpp"

namespace compctrl {
namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw Error(ErrorCode::kInvalidArgument, what);
}

std::string shape(const Matrix& m) {
  return std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

double round_up(double v) { return std::ceil(v * 1e12) / 1e12; }

StabilityCertificate finish_certificate(const Matrix& closed_loop, const Matrix& K,
                                        const ComplexMatrix& S, const ComplexMatrix& L) {
  const Eigen::Index m = closed_loop.rows();
  require(S.rows() == m && S.cols() == m && L.rows() == m && L.cols() == m,
          "certificate matrices must be " + shape(closed_loop));
  const double cond = condition_number(S);
  if (!std::isfinite(cond) || cond > kMaxEigenbasisCondition) {
    throw Error(ErrorCode::kCertificationFailed,
                "eigenbasis condition number " + std::to_string(cond) + " exceeds 1e8");
  }
  const ComplexMatrix recon = S * L * S.inverse();
  const double err = spectral_norm(ComplexMatrix(recon - closed_loop.cast<std::complex<double>>()));
  const double scale = spectral_norm(closed_loop);
  if (err > 1e-8 * scale + 1e-14) {
    throw Error(ErrorCode::kCertificationFailed, "S L S^-1 does not reproduce A + BK", err);
  }
  const double l_norm = spectral_norm(L);
  if (l_norm >= 1.0) {
    throw Error(ErrorCode::kNotStable, "||L|| = " + std::to_string(l_norm) + " >= 1");
  }
  StabilityCertificate cert;
  cert.S = S;
  cert.L = L;
  cert.kappa = round_up(std::max({1.0, spectral_norm(K), cond}));
  cert.gamma = 1.0 - std::max(0.5, l_norm);
  return cert;
}

}  // namespace

LtiSystem make_system(Matrix A, Matrix B, Matrix Q, Matrix R, double W,
                      std::optional<double> kappa) {
  const Eigen::Index m = A.rows();
  const Eigen::Index n = B.cols();
  require(m > 0 && A.cols() == m, "A must be square and nonempty, got " + shape(A));
  require(n > 0 && B.rows() == m, "B must be " + std::to_string(m) + "xn, got " + shape(B));
  require(Q.rows() == m && Q.cols() == m, "Q must be " + shape(A) + ", got " + shape(Q));
  require(R.rows() == n && R.cols() == n, "R must be nxn, got " + shape(R));
  require(all_finite(A) && all_finite(B) && all_finite(Q) && all_finite(R),
          "system matrices must be finite");
  require(is_symmetric(Q), "Q must be symmetric");
  require(is_symmetric(R), "R must be symmetric");
  require(std::isfinite(W) && W >= 0.0, "W must be a finite nonnegative number");

  const double q_min = min_eigenvalue(Q);
  const double q_max = max_eigenvalue(Q);
  const double r_min = min_eigenvalue(R);
  const double r_max = max_eigenvalue(R);
  require(q_min >= -1e-12 * std::max(1.0, q_max), "Q must be positive semidefinite");
  require(r_min > 0.0, "R must be positive definite");
  if (kappa) {
    require(spectral_norm(A) <= *kappa && spectral_norm(B) <= *kappa,
            "||A|| and ||B|| must not exceed kappa");
  }

  LtiSystem sys;
  sys.A = std::move(A);
  sys.B = std::move(B);
  sys.Q = 0.5 * (Q + Q.transpose());
  sys.R = 0.5 * (R + R.transpose());
  sys.W = W;
  sys.beta = std::max(q_max, r_max);
  sys.mu = r_min;
  return sys;
}

LtiSystem double_integrator() {
  Matrix A(2, 2);
  A << 1, 1, 0, 1;
  Matrix B(2, 1);
  B << 0, 1;
  return make_system(A, B, Matrix::Identity(2, 2), Matrix::Identity(1, 1), 1.0);
}

Vector step(const LtiSystem& sys, const Vector& x, const Vector& u, const Vector& w) {
  require(x.size() == sys.state_dim() && w.size() == sys.state_dim(),
          "state and disturbance must have dimension " + std::to_string(sys.state_dim()));
  require(u.size() == sys.input_dim(),
          "control must have dimension " + std::to_string(sys.input_dim()));
  return sys.A * x + sys.B * u + w;
}

double cost(const LtiSystem& sys, const Vector& x, const Vector& u) {
  require(x.size() == sys.state_dim(),
          "state must have dimension " + std::to_string(sys.state_dim()));
  require(u.size() == sys.input_dim(),
          "control must have dimension " + std::to_string(sys.input_dim()));
  return std::max(0.0, x.dot(sys.Q * x) + u.dot(sys.R * u));
}

Vector LinearController::act(std::size_t, const Vector& x) { return K_ * x; }

Vector OpenLoopController::act(std::size_t t, const Vector&) {
  if (t >= controls_.size()) {
    throw Error(ErrorCode::kProtocolViolation, "open-loop sequence exhausted", t);
  }
  return controls_[t];
}

Trajectory rollout(const LtiSystem& sys, Controller& controller, std::span<const Vector> w) {
  const Eigen::Index m = sys.state_dim();
  Trajectory traj;
  traj.states.reserve(w.size() + 1);
  traj.controls.reserve(w.size());
  traj.disturbances.assign(w.begin(), w.end());
  traj.step_costs.reserve(w.size());

  Vector x = Vector::Zero(m);
  traj.states.push_back(x);
  for (std::size_t t = 0; t < w.size(); ++t) {
    require(w[t].size() == m, "disturbance " + std::to_string(t) + " has wrong dimension");
    if (w[t].norm() > sys.W * (1.0 + 1e-12)) traj.disturbance_bound_exceeded = true;
    Vector u = controller.act(t, x);
    if (u.size() != sys.input_dim()) {
      throw Error(ErrorCode::kInvalidArgument,
                  "controller returned an action of dimension " + std::to_string(u.size()), t);
    }
    const double c = cost(sys, x, u);
    x = sys.A * x + sys.B * u + w[t];
    if (!x.allFinite() || !std::isfinite(c)) {
      throw Error(ErrorCode::kNumericDivergence, "state is no longer finite", t);
    }
    traj.controls.push_back(std::move(u));
    traj.step_costs.push_back(c);
    traj.total_cost += c;
    traj.states.push_back(x);
  }
  return traj;
}

StabilityCertificate stability_certificate(const Matrix& A, const Matrix& B, const Matrix& K) {
  require(A.rows() == A.cols() && B.rows() == A.rows(), "A must be square and B must match");
  require(K.rows() == B.cols() && K.cols() == A.rows(),
          "K must be " + std::to_string(B.cols()) + "x" + std::to_string(A.rows()));
  const Matrix closed_loop = A + B * K;
  Eigen::EigenSolver<Matrix> es(closed_loop);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorCode::kCertificationFailed, "eigendecomposition did not converge");
  }
  const double rho = es.eigenvalues().cwiseAbs().maxCoeff();
  if (rho >= 1.0) {
    throw Error(ErrorCode::kNotStable, "spectral radius " + std::to_string(rho) + " >= 1");
  }
  ComplexMatrix S = es.eigenvectors();
  S.colwise().normalize();
  const ComplexMatrix L = es.eigenvalues().asDiagonal();
  return finish_certificate(closed_loop, K, S, L);
}

StabilityCertificate stability_certificate(const LtiSystem& sys, const Matrix& K) {
  return stability_certificate(sys.A, sys.B, K);
}

StabilityCertificate stability_certificate(const Matrix& A, const Matrix& B, const Matrix& K,
                                           const ComplexMatrix& S, const ComplexMatrix& L) {
  require(A.rows() == A.cols() && B.rows() == A.rows(), "A must be square and B must match");
  require(K.rows() == B.cols() && K.cols() == A.rows(), "K has the wrong shape");
  return finish_certificate(A + B * K, K, S, L);
}

}  // namespace compctrl
