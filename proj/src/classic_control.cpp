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

#include "compctrl/classic_control.hpp"

#include <cmath>
#include <string>

#include "compctrl/errors.hpp"

namespace compctrl {
namespace {

constexpr int kMaxSweeps = 100000;
constexpr double kRelTol = 1e-12;

Matrix gain_for(const LtiSystem& sys, const Matrix& P) {
  const Matrix G = sys.R + sys.B.transpose() * P * sys.B;
  return -G.ldlt().solve(sys.B.transpose() * P * sys.A);
}

}  // namespace

Matrix dare_map(const LtiSystem& sys, const Matrix& P) {
  const Matrix& A = sys.A;
  const Matrix& B = sys.B;
  const Matrix G = sys.R + B.transpose() * P * B;
  const Matrix BtPA = B.transpose() * P * A;
  Matrix next = sys.Q + A.transpose() * P * A - BtPA.transpose() * G.ldlt().solve(BtPA);
  return 0.5 * (next + next.transpose());
}

RiccatiSolution solve_dare(const LtiSystem& sys) {
  Matrix P = sys.Q;
  int sweeps = 0;
  for (; sweeps < kMaxSweeps; ++sweeps) {
    Matrix next = dare_map(sys, P);
    if (!next.allFinite()) {
      throw Error(ErrorCode::kSolverFailed, "DARE iteration diverged", spectral_norm(P));
    }
    const double change = spectral_norm(Matrix(next - P));
    P = std::move(next);
    if (change <= kRelTol * std::max(1.0, spectral_norm(P))) break;
  }
  RiccatiSolution sol;
  sol.P = P;
  sol.K = gain_for(sys, P);
  sol.iterations = sweeps + 1;
  sol.residual = spectral_norm(Matrix(P - dare_map(sys, P)));
  if (sol.residual > 1e-9 * (1.0 + spectral_norm(P))) {
    throw Error(ErrorCode::kSolverFailed, "DARE did not converge", sol.residual);
  }
  if (spectral_radius(sys.A + sys.B * sol.K) >= 1.0) {
    throw Error(ErrorCode::kSolverFailed, "DARE gain is not stabilizing", sol.residual);
  }
  return sol;
}

std::optional<RiccatiSolution> hinf_at_level(const LtiSystem& sys, double level) {
  const Eigen::Index m = sys.state_dim();
  const Matrix I = Matrix::Identity(m, m);
  const double g2 = level * level;
  auto lambda_of = [&](const Matrix& P) -> std::optional<Matrix> {
    const Matrix gap = g2 * I - P;
    Eigen::LLT<Matrix> llt(gap);
    if (llt.info() != Eigen::Success || min_eigenvalue(gap) <= 1e-10 * g2) return std::nullopt;
    Matrix lam = P + P * llt.solve(P);
    return Matrix(0.5 * (lam + lam.transpose()));
  };

  Matrix P = sys.Q;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    auto lam = lambda_of(P);
    if (!lam) return std::nullopt;
    const Matrix G = sys.R + sys.B.transpose() * *lam * sys.B;
    const Matrix BtLA = sys.B.transpose() * *lam * sys.A;
    Matrix next = sys.Q + sys.A.transpose() * *lam * sys.A - BtLA.transpose() * G.ldlt().solve(BtLA);
    next = 0.5 * (next + next.transpose());
    if (!next.allFinite() || spectral_norm(next) > 1e12) return std::nullopt;
    const double change = spectral_norm(Matrix(next - P));
    P = std::move(next);
    if (change <= kRelTol * std::max(1.0, spectral_norm(P))) {
      auto lam_final = lambda_of(P);
      if (!lam_final) return std::nullopt;
      if (min_eigenvalue(P) < -1e-9 * std::max(1.0, spectral_norm(P))) return std::nullopt;
      const Matrix Gf = sys.R + sys.B.transpose() * *lam_final * sys.B;
      RiccatiSolution sol;
      sol.P = P;
      sol.K = -Gf.ldlt().solve(sys.B.transpose() * *lam_final * sys.A);
      sol.iterations = sweep + 1;
      sol.residual = change;
      if (spectral_radius(sys.A + sys.B * sol.K) >= 1.0) return std::nullopt;
      return sol;
    }
  }
  return std::nullopt;
}

HinfSolution solve_hinf(const LtiSystem& sys, double tol, const HinfSettings& settings) {
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be positive");
  double lo = settings.gamma_lo;
  double hi = settings.gamma_hi;
  if (!hinf_at_level(sys, hi)) {
    throw Error(ErrorCode::kSolverFailed, "no feasible attenuation level up to " + std::to_string(hi));
  }
  if (hinf_at_level(sys, lo)) {
    hi = lo;
  } else {
    for (int i = 0; i < settings.bisection_steps && hi > lo * (1.0 + 0.25 * tol); ++i) {
      const double mid = std::sqrt(lo * hi);
      if (hinf_at_level(sys, mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }
  HinfSolution out;
  out.gamma_min = hi;
  out.gamma_attained = (1.0 + tol) * hi;
  auto sol = hinf_at_level(sys, out.gamma_attained);
  if (!sol) {
    out.gamma_attained = hi;
    sol = hinf_at_level(sys, hi);
  }
  if (!sol) throw Error(ErrorCode::kSolverFailed, "H-infinity synthesis failed at the attained level");
  out.riccati = std::move(*sol);
  return out;
}

OfflineSolution offline_optimal(const LtiSystem& sys, std::span<const Vector> w) {
  const std::size_t T = w.size();
  if (T == 0) throw Error(ErrorCode::kInvalidArgument, "horizon must be at least 1");
  const Eigen::Index m = sys.state_dim();
  for (std::size_t t = 0; t < T; ++t) {
    if (w[t].size() != m) {
      throw Error(ErrorCode::kInvalidArgument, "disturbance " + std::to_string(t) + " has wrong dimension");
    }
  }
  const Matrix& A = sys.A;
  const Matrix& B = sys.B;

  // Value at step t+1 is x'P x + 2 p'x + const; terminal P = 0, p = 0.
  std::vector<Matrix> gains(T);
  std::vector<Vector> offsets(T);
  Matrix P = Matrix::Zero(m, m);
  Vector p = Vector::Zero(m);
  for (std::size_t k = T; k-- > 0;) {
    const Matrix G = sys.R + B.transpose() * P * B;
    const auto G_ldlt = G.ldlt();
    const Vector g = P * w[k] + p;
    gains[k] = -G_ldlt.solve(B.transpose() * P * A);
    offsets[k] = -G_ldlt.solve(B.transpose() * g);
    const Matrix closed = A + B * gains[k];
    Matrix next = sys.Q + A.transpose() * P * A + A.transpose() * P * B * gains[k];
    P = 0.5 * (next + next.transpose());
    p = closed.transpose() * g;
  }

  std::vector<Vector> controls;
  controls.reserve(T);
  Vector x = Vector::Zero(m);
  for (std::size_t t = 0; t < T; ++t) {
    controls.push_back(gains[t] * x + offsets[t]);
    x = A * x + B * controls.back() + w[t];
  }
  OpenLoopController replay(std::move(controls));
  OfflineSolution out;
  out.trajectory = rollout(sys, replay, w);
  out.opt_cost = out.trajectory.total_cost;
  return out;
}

}  // namespace compctrl
