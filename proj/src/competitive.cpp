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

#include "compctrl/competitive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "compctrl/errors.hpp"

namespace compctrl {
namespace {

constexpr int kMaxSweeps = 100000;
constexpr double kRelTol = 1e-12;
constexpr double kDefiniteMargin = 1e-10;
constexpr double kMaxHtildeCondition = 1e12;
constexpr double kDivergenceNorm = 1e12;

Matrix normalized_input(const LtiSystem& sys) { return sys.B * sym_inv_sqrt(sys.R); }

Matrix symmetrize(const Matrix& m) { return 0.5 * (m + m.transpose()); }

Matrix filter_map(const Matrix& A, const Matrix& BBt, const Matrix& Qh, const Matrix& P) {
  const Eigen::Index m = A.rows();
  const Matrix Sigma = Matrix::Identity(m, m) + Qh * P * Qh;
  const Matrix K = A * P * Qh * Sigma.inverse();
  return symmetrize(BBt + A * P * A.transpose() - K * Sigma * K.transpose());
}

Matrix h_tilde(const SyntheticSystem& syn, const Matrix& P_hat, double alpha) {
  const Eigen::Index n = syn.B_hat_u.cols();
  const Eigen::Index m = syn.B_hat_w.cols();
  Matrix B_tilde(syn.A_hat.rows(), n + m);
  B_tilde << syn.B_hat_u, syn.B_hat_w;
  Matrix H = B_tilde.transpose() * P_hat * B_tilde;
  H.topLeftCorner(n, n) += Matrix::Identity(n, n);
  H.bottomRightCorner(m, m) -= alpha * Matrix::Identity(m, m);
  return symmetrize(H);
}

double symmetric_condition(const Matrix& H) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  const Vector mags = es.eigenvalues().cwiseAbs();
  const double lo = mags.minCoeff();
  return lo > 0.0 ? mags.maxCoeff() / lo : std::numeric_limits<double>::infinity();
}

bool worst_case_direction_ok(const SyntheticSystem& syn, const Matrix& P_hat, double alpha) {
  const Eigen::Index m = syn.B_hat_w.cols();
  const Matrix block = syn.B_hat_w.transpose() * P_hat * syn.B_hat_w -
                       alpha * Matrix::Identity(m, m);
  return max_eigenvalue(block) < -kDefiniteMargin;
}

Matrix phat_map(const SyntheticSystem& syn, const Matrix& P_hat, const Matrix& H) {
  const Eigen::Index n = syn.B_hat_u.cols();
  const Eigen::Index m = syn.B_hat_w.cols();
  Matrix B_tilde(syn.A_hat.rows(), n + m);
  B_tilde << syn.B_hat_u, syn.B_hat_w;
  const Matrix BtPA = B_tilde.transpose() * P_hat * syn.A_hat;
  return symmetrize(syn.cost + syn.A_hat.transpose() * P_hat * syn.A_hat -
                    BtPA.transpose() * H.partialPivLu().solve(BtPA));
}

}  // namespace

FilterSolution solve_filter(const LtiSystem& sys) {
  const Eigen::Index m = sys.state_dim();
  const Matrix Bn = normalized_input(sys);
  const Matrix BBt = Bn * Bn.transpose();
  const Matrix Qh = sym_sqrt(sys.Q);

  Matrix P = BBt;
  int sweeps = 0;
  for (; sweeps < kMaxSweeps; ++sweeps) {
    Matrix next = filter_map(sys.A, BBt, Qh, P);
    if (!next.allFinite()) {
      throw Error(ErrorCode::kSolverFailed, "filter Riccati iteration diverged", spectral_norm(P));
    }
    const double change = spectral_norm(Matrix(next - P));
    P = std::move(next);
    if (change <= kRelTol * std::max(1.0, spectral_norm(P))) break;
  }

  FilterSolution f;
  f.P = P;
  f.Q_sqrt = Qh;
  f.Sigma = Matrix::Identity(m, m) + Qh * P * Qh;
  f.Sigma = symmetrize(f.Sigma);
  f.K = sys.A * P * Qh * f.Sigma.inverse();
  f.Sigma_sqrt = sym_sqrt(f.Sigma);
  f.Sigma_inv_sqrt = sym_inv_sqrt(f.Sigma);
  f.iterations = sweeps + 1;
  f.residual = spectral_norm(Matrix(P - (BBt + sys.A * P * sys.A.transpose() -
                                         f.K * f.Sigma * f.K.transpose())));
  if (f.residual > 1e-9 * (1.0 + spectral_norm(P))) {
    throw Error(ErrorCode::kSolverFailed, "filter Riccati did not converge", f.residual);
  }
  return f;
}

SyntheticSystem synthetic_system(const LtiSystem& sys, const FilterSolution& filter) {
  const Eigen::Index m = sys.state_dim();
  const Eigen::Index n = sys.input_dim();
  SyntheticSystem syn;
  syn.A_hat = Matrix::Zero(2 * m, 2 * m);
  syn.A_hat.topLeftCorner(m, m) = sys.A;
  syn.A_hat.topRightCorner(m, m) = filter.K * filter.Sigma_sqrt;
  syn.B_hat_u = Matrix::Zero(2 * m, n);
  syn.B_hat_u.topRows(m) = normalized_input(sys);
  syn.B_hat_w = Matrix::Zero(2 * m, m);
  syn.B_hat_w.bottomRows(m) = Matrix::Identity(m, m);
  const Matrix cross = filter.Q_sqrt * filter.Sigma_sqrt;
  syn.cost = Matrix::Zero(2 * m, 2 * m);
  syn.cost.topLeftCorner(m, m) = sys.Q;
  syn.cost.topRightCorner(m, m) = cross;
  syn.cost.bottomLeftCorner(m, m) = cross.transpose();
  syn.cost.bottomRightCorner(m, m) = filter.Sigma;
  return syn;
}

std::optional<PhatResult> solve_phat(const LtiSystem& sys, const FilterSolution& filter,
                                     double alpha) {
  if (!(alpha > 1.0)) throw Error(ErrorCode::kInvalidArgument, "alpha must exceed 1");
  const SyntheticSystem syn = synthetic_system(sys, filter);
  Matrix P_hat = syn.cost;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    if (!worst_case_direction_ok(syn, P_hat, alpha)) return std::nullopt;
    const Matrix H = h_tilde(syn, P_hat, alpha);
    if (symmetric_condition(H) > kMaxHtildeCondition) return std::nullopt;
    Matrix next = phat_map(syn, P_hat, H);
    if (!next.allFinite()) {
      throw Error(ErrorCode::kSolverFailed, "P_hat iteration produced non-finite values");
    }
    const double norm = spectral_norm(next);
    if (norm > kDivergenceNorm) return std::nullopt;
    const double change = spectral_norm(Matrix(next - P_hat));
    P_hat = std::move(next);
    if (change <= kRelTol * (1.0 + norm)) {
      if (!worst_case_direction_ok(syn, P_hat, alpha)) return std::nullopt;
      const Matrix Hf = h_tilde(syn, P_hat, alpha);
      if (symmetric_condition(Hf) > kMaxHtildeCondition) return std::nullopt;
      PhatResult out;
      out.P_hat = P_hat;
      out.iterations = sweep + 1;
      out.residual = spectral_norm(Matrix(P_hat - phat_map(syn, P_hat, Hf)));
      return out;
    }
  }
  return std::nullopt;
}

CompetitiveSolution assemble_competitive(const LtiSystem& sys, const FilterSolution& filter,
                                         double alpha) {
  auto phat = solve_phat(sys, filter, alpha);
  if (!phat) {
    throw Error(ErrorCode::kSolverFailed, "P_hat infeasible at alpha = " + std::to_string(alpha));
  }
  const Eigen::Index m = sys.state_dim();
  const Eigen::Index n = sys.input_dim();
  const SyntheticSystem syn = synthetic_system(sys, filter);

  CompetitiveSolution c;
  c.filter = filter;
  c.A_hat = syn.A_hat;
  c.B_hat_u = syn.B_hat_u;
  c.B_hat_w = syn.B_hat_w;
  c.P_hat = phat->P_hat;
  c.phat_residual = phat->residual;
  c.alpha_star = alpha;
  c.R_inv_sqrt = sym_inv_sqrt(sys.R);

  const Matrix& Ph = c.P_hat;
  const Matrix worst = -alpha * Matrix::Identity(m, m) + c.B_hat_w.transpose() * Ph * c.B_hat_w;
  c.P_tilde = symmetrize(Ph - Ph * c.B_hat_w * worst.ldlt().solve(c.B_hat_w.transpose() * Ph));
  c.H_tilde = h_tilde(syn, Ph, alpha);
  const Matrix G = Matrix::Identity(n, n) + c.B_hat_u.transpose() * c.P_tilde * c.B_hat_u;
  const Matrix K_normalized = -G.ldlt().solve(c.B_hat_u.transpose() * c.P_tilde * c.A_hat);
  c.K_hat = c.R_inv_sqrt * K_normalized;
  c.K_hat_0 = c.K_hat.leftCols(m);
  c.K_hat_1 = c.K_hat.rightCols(m);

  if (spectral_radius(sys.A + sys.B * c.K_hat_0) >= 1.0) {
    throw Error(ErrorCode::kSolverFailed, "competitive closed loop A + B K_hat_0 is not stable");
  }
  if (spectral_radius(filter_dynamics(sys, c)) >= 1.0) {
    throw Error(ErrorCode::kSolverFailed, "filter dynamics A - K Q^{1/2} are not stable");
  }
  return c;
}

CompetitiveSolution compute_alpha_star(const LtiSystem& sys, double tol) {
  if (!(tol > 0.0)) throw Error(ErrorCode::kInvalidArgument, "tol must be positive");
  const FilterSolution filter = solve_filter(sys);
  double lo = 1.0 + 1e-6;
  double hi = 1e6;
  if (!solve_phat(sys, filter, hi)) {
    throw Error(ErrorCode::kSolverFailed,
                "no finite competitive ratio up to 1e6 for this system");
  }
  if (solve_phat(sys, filter, lo)) {
    hi = lo;
  } else {
    while (hi / lo > 1.0 + tol) {
      const double mid = std::sqrt(lo * hi);
      if (solve_phat(sys, filter, mid)) {
        hi = mid;
      } else {
        lo = mid;
      }
    }
  }
  return assemble_competitive(sys, filter, hi);
}

Matrix disturbance_gain(const CompetitiveSolution& comp) {
  return comp.K_hat_1 * comp.filter.Sigma_inv_sqrt * comp.filter.Q_sqrt - comp.K_hat_0;
}

Matrix filter_dynamics(const LtiSystem& sys, const CompetitiveSolution& comp) {
  return sys.A - comp.filter.K * comp.filter.Q_sqrt;
}

AssumptionAudit audit_assumption(const LtiSystem& sys, const CompetitiveSolution& comp) {
  AssumptionAudit audit;
  audit.closed_loop = stability_certificate(sys.A, sys.B, comp.K_hat_0);
  audit.filter = stability_certificate(Matrix(sys.A.transpose()), comp.filter.Q_sqrt,
                                       Matrix(-comp.filter.K.transpose()));
  audit.kappa = std::max({audit.closed_loop.kappa, audit.filter.kappa, spectral_norm(comp.K_hat),
                          spectral_norm(sys.A), spectral_norm(sys.B)});
  audit.gamma = std::min(audit.closed_loop.gamma, audit.filter.gamma);
  return audit;
}

CompetitiveRuntime::CompetitiveRuntime(const LtiSystem& sys, CompetitiveSolution solution)
    : A_(sys.A),
      B_(sys.B),
      filter_dyn_(filter_dynamics(sys, solution)),
      w_hat_map_(solution.filter.Sigma_inv_sqrt * solution.filter.Q_sqrt),
      solution_(std::move(solution)) {
  const Eigen::Index m = A_.rows();
  nu_ = Vector::Zero(m);
  xi_ = Vector::Zero(2 * m);
  last_x_ = Vector::Zero(m);
  last_u_ = Vector::Zero(B_.cols());
  w_inferred_ = Vector::Zero(m);
}

Vector CompetitiveRuntime::expected_synthetic_state() const {
  const Eigen::Index m = A_.rows();
  Vector xi(2 * m);
  xi << last_x_ - nu_, w_hat_map_ * nu_;
  return xi;
}

Vector CompetitiveRuntime::act(std::size_t t, const Vector& x) {
  if (t != t_) {
    throw Error(ErrorCode::kProtocolViolation,
                "expected step " + std::to_string(t_) + ", got " + std::to_string(t));
  }
  const Eigen::Index m = A_.rows();
  if (x.size() != m) throw Error(ErrorCode::kInvalidArgument, "state has the wrong dimension");
  if (t == 0) {
    w_inferred_.setZero();
    last_x_ = x;
    xi_ = expected_synthetic_state();
  } else {
    w_inferred_ = x - A_ * last_x_ - B_ * last_u_;
    nu_ = filter_dyn_ * nu_ + w_inferred_;
    Vector injected = Vector::Zero(2 * m);
    injected.topRows(m) = B_ * last_u_;
    injected.bottomRows(m) = w_hat_map_ * nu_;
    xi_ = solution_.A_hat * xi_ + injected;
    last_x_ = x;
  }
  Vector u = solution_.K_hat * expected_synthetic_state();
  last_u_ = u;
  ++t_;
  return u;
}

}  // namespace compctrl
