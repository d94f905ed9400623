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

#include "compctrl/gpc.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "compctrl/errors.hpp"

namespace compctrl {
namespace {

constexpr int kMaxHindsightIterations = 100000;

// window[idx] or zero past its end.
Vector window_at(std::span<const Vector> window, std::size_t idx, Eigen::Index m) {
  return idx < window.size() ? window[idx] : Vector::Zero(m);
}

Vector memory_term(const Weights& M, std::span<const Vector> window, std::size_t offset,
                   Eigen::Index n, Eigen::Index m) {
  Vector acc = Vector::Zero(n);
  for (std::size_t i = 1; i <= M.size(); ++i) acc.noalias() += M[i - 1] * window_at(window, offset + i, m);
  return acc;
}

Matrix clip_singular_values(const Matrix& m, double radius) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  Vector s = svd.singularValues().cwiseMin(radius);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

struct IdealRollout {
  Vector y;
  Vector v;
};

IdealRollout ideal_rollout(const Weights& M, std::span<const Vector> window, const LtiSystem& sys,
                           const Matrix& K_stab) {
  const Eigen::Index m = sys.state_dim();
  const Eigen::Index n = sys.input_dim();
  const std::size_t H = M.size();
  Vector y = Vector::Zero(m);
  // Step j runs time t-H+j; its w_{s-i} sits at window index H-1-j+i.
  for (std::size_t j = 0; j < H; ++j) {
    const std::size_t base = H - 1 - j;
    Vector v = K_stab * y + memory_term(M, window, base, n, m);
    y = sys.A * y + sys.B * v + window_at(window, base, m);
  }
  Vector v = K_stab * y;
  for (std::size_t i = 1; i <= H; ++i) v.noalias() += M[i - 1] * window_at(window, i - 1, m);
  return {y, v};
}

}  // namespace

void validate(const GpcConfig& config) {
  if (config.H < 1) throw Error(ErrorCode::kInvalidArgument, "GPC memory H must be at least 1");
  if (!(config.eta >= 0.0) || !std::isfinite(config.eta)) {
    throw Error(ErrorCode::kInvalidArgument, "GPC learning rate must be finite and nonnegative");
  }
  if (!(config.theta > 0.0)) throw Error(ErrorCode::kInvalidArgument, "theta must be positive");
  if (!(config.gamma_prime > 0.0 && config.gamma_prime < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma' must lie in (0, 1)");
  }
}

double surrogate_loss(const Weights& M, std::span<const Vector> window, const LtiSystem& sys,
                      const Matrix& K_stab) {
  const IdealRollout r = ideal_rollout(M, window, sys, K_stab);
  return cost(sys, r.y, r.v);
}

Weights surrogate_gradient(const Weights& M, std::span<const Vector> window, const LtiSystem& sys,
                           const Matrix& K_stab) {
  const Eigen::Index m = sys.state_dim();
  const std::size_t H = M.size();
  const IdealRollout r = ideal_rollout(M, window, sys, K_stab);
  const Matrix closed_loop = sys.A + sys.B * K_stab;

  Weights grad(H, Matrix::Zero(sys.input_dim(), m));
  const Vector dv = 2.0 * sys.R * r.v;
  Vector dy = 2.0 * sys.Q * r.y + K_stab.transpose() * dv;
  for (std::size_t i = 1; i <= H; ++i) grad[i - 1] += dv * window_at(window, i - 1, m).transpose();
  for (std::size_t j = H; j-- > 0;) {
    const Vector dmem = sys.B.transpose() * dy;
    const std::size_t base = H - 1 - j;
    for (std::size_t i = 1; i <= H; ++i) {
      grad[i - 1] += dmem * window_at(window, base + i, m).transpose();
    }
    dy = closed_loop.transpose() * dy;
  }
  return grad;
}

Weights project(Weights M, double theta, double gamma_prime) {
  for (std::size_t i = 0; i < M.size(); ++i) {
    const double radius = theta * std::pow(1.0 - gamma_prime, static_cast<double>(i));
    const double norm = spectral_norm(M[i]);
    if (norm > radius) M[i] *= radius / norm;
  }
  return M;
}

Weights project_exact(Weights M, double theta, double gamma_prime) {
  for (std::size_t i = 0; i < M.size(); ++i) {
    const double radius = theta * std::pow(1.0 - gamma_prime, static_cast<double>(i));
    if (spectral_norm(M[i]) > radius) M[i] = clip_singular_values(M[i], radius);
  }
  return M;
}

GpcState initial_state(const LtiSystem& sys, const GpcConfig& config) {
  validate(config);
  if (config.K_stab.rows() != sys.input_dim() || config.K_stab.cols() != sys.state_dim()) {
    throw Error(ErrorCode::kInvalidArgument, "GPC stabilizer has the wrong shape");
  }
  GpcState s;
  s.M.assign(config.H, Matrix::Zero(sys.input_dim(), sys.state_dim()));
  s.w_buffer.assign(2 * config.H, Vector::Zero(sys.state_dim()));
  s.last_x = Vector::Zero(sys.state_dim());
  s.last_u = Vector::Zero(sys.input_dim());
  return s;
}

GpcState gpc_update(GpcState state, const LtiSystem& sys, const GpcConfig& config) {
  Weights grad = surrogate_gradient(state.M, state.w_buffer, sys, config.K_stab);
  for (const Matrix& g : grad) {
    if (!g.allFinite()) {
      throw Error(ErrorCode::kNumericDivergence, "GPC gradient is not finite", state.t);
    }
  }
  double eta = config.eta;
  if (config.schedule == StepSchedule::kInverseSqrt) {
    eta /= std::sqrt(static_cast<double>(state.updates + 1));
  }
  for (std::size_t i = 0; i < state.M.size(); ++i) state.M[i] -= eta * grad[i];
  state.M = project(std::move(state.M), config.theta, config.gamma_prime);
  ++state.updates;
  return state;
}

GpcController::GpcController(const LtiSystem& sys, GpcConfig config)
    : sys_(sys), config_(std::move(config)), state_(initial_state(sys_, config_)) {}

Vector GpcController::act(std::size_t t, const Vector& x) {
  if (t != state_.t) {
    throw Error(ErrorCode::kProtocolViolation,
                "expected step " + std::to_string(state_.t) + ", got " + std::to_string(t));
  }
  if (x.size() != sys_.state_dim()) {
    throw Error(ErrorCode::kInvalidArgument, "state has the wrong dimension");
  }
  if (t > 0) {
    auto& buf = state_.w_buffer;
    std::rotate(buf.rbegin(), buf.rbegin() + 1, buf.rend());
    buf.front() = x - sys_.A * state_.last_x - sys_.B * state_.last_u;
  }
  Vector u = config_.K_stab * x;
  for (int i = 0; i < config_.H; ++i) u.noalias() += state_.M[i] * state_.w_buffer[i];
  state_.last_x = x;
  state_.last_u = u;
  ++state_.t;
  if (t > 0) state_ = gpc_update(std::move(state_), sys_, config_);
  return u;
}

DacPolicy GpcController::current_policy() const {
  DacPolicy p;
  p.K_stab = config_.K_stab;
  p.M = state_.M;
  p.H = config_.H;
  p.theta = config_.theta;
  p.gamma_prime = config_.gamma_prime;
  return p;
}

namespace {

// States x_1..x_T and actions u_1..u_T of a DAC policy on a known sequence,
// stacked into single vectors.
void simulate_stacked(const LtiSystem& sys, std::span<const Vector> w, const Matrix& K_stab,
                      const Weights& M, Vector& xs, Vector& us) {
  const Eigen::Index m = sys.state_dim();
  const Eigen::Index n = sys.input_dim();
  const std::size_t T = w.size();
  xs.resize(static_cast<Eigen::Index>(T) * m);
  us.resize(static_cast<Eigen::Index>(T) * n);
  Vector x = Vector::Zero(m);
  for (std::size_t t = 0; t < T; ++t) {
    Vector u = K_stab * x;
    for (std::size_t i = 1; i <= M.size() && i <= t; ++i) u.noalias() += M[i - 1] * w[t - i];
    xs.segment(static_cast<Eigen::Index>(t) * m, m) = x;
    us.segment(static_cast<Eigen::Index>(t) * n, n) = u;
    x = sys.A * x + sys.B * u + w[t];
  }
}

Weights unflatten(const Vector& theta, int H, Eigen::Index n, Eigen::Index m) {
  Weights M(H, Matrix(n, m));
  for (int i = 0; i < H; ++i) {
    M[i] = Eigen::Map<const Matrix>(theta.data() + i * n * m, n, m);
  }
  return M;
}

Vector flatten(const Weights& M) {
  if (M.empty()) return Vector();
  const Eigen::Index block = M.front().size();
  Vector out(static_cast<Eigen::Index>(M.size()) * block);
  for (std::size_t i = 0; i < M.size(); ++i) {
    out.segment(static_cast<Eigen::Index>(i) * block, block) =
        Eigen::Map<const Vector>(M[i].data(), block);
  }
  return out;
}

}  // namespace

HindsightResult best_dac_in_hindsight(const LtiSystem& sys, std::span<const Vector> w,
                                      const DacClass& cls) {
  if (w.empty()) throw Error(ErrorCode::kInvalidArgument, "horizon must be at least 1");
  if (cls.H < 1) throw Error(ErrorCode::kInvalidArgument, "H must be at least 1");
  const Eigen::Index m = sys.state_dim();
  const Eigen::Index n = sys.input_dim();
  const Eigen::Index d = cls.H * n * m;
  const std::size_t T = w.size();

  Vector x0, u0;
  const Weights zero(cls.H, Matrix::Zero(n, m));
  simulate_stacked(sys, w, cls.K_stab, zero, x0, u0);

  // Columns of Gx, Gu: response of the stacked states/actions to each
  // coordinate of the flattened weights.
  Matrix Gx(x0.size(), d), Gu(u0.size(), d);
  for (Eigen::Index k = 0; k < d; ++k) {
    Vector e = Vector::Zero(d);
    e(k) = 1.0;
    Vector xk, uk;
    simulate_stacked(sys, w, cls.K_stab, unflatten(e, cls.H, n, m), xk, uk);
    Gx.col(k) = xk - x0;
    Gu.col(k) = uk - u0;
  }

  Matrix hess = Matrix::Zero(d, d);
  Vector lin = Vector::Zero(d);
  for (std::size_t t = 0; t < T; ++t) {
    const auto gx = Gx.middleRows(static_cast<Eigen::Index>(t) * m, m);
    const auto gu = Gu.middleRows(static_cast<Eigen::Index>(t) * n, n);
    const Matrix Qgx = sys.Q * gx;
    const Matrix Rgu = sys.R * gu;
    hess.noalias() += gx.transpose() * Qgx + gu.transpose() * Rgu;
    lin.noalias() += Qgx.transpose() * x0.segment(static_cast<Eigen::Index>(t) * m, m) +
                     Rgu.transpose() * u0.segment(static_cast<Eigen::Index>(t) * n, n);
  }
  hess = 0.5 * (hess + hess.transpose());

  auto proj = [&](const Vector& v) {
    return flatten(project_exact(unflatten(v, cls.H, n, m), cls.theta, cls.gamma_prime));
  };
  auto gradient = [&](const Vector& v) -> Vector { return 2.0 * (hess * v + lin); };

  Vector theta = Vector::Zero(d);
  if (lin.norm() > 0.0) theta = proj(hess.completeOrthogonalDecomposition().solve(-lin));

  const double lipschitz = 2.0 * std::max(0.0, max_eigenvalue(hess));
  const double tol = 1e-8 * std::max(1.0, gradient(Vector::Zero(d)).norm());
  HindsightResult out;
  double pg_norm = 0.0;
  if (lipschitz > 0.0) {
    int it = 0;
    for (; it < kMaxHindsightIterations; ++it) {
      const Vector next = proj(theta - gradient(theta) / lipschitz);
      pg_norm = lipschitz * (theta - next).norm();
      theta = next;
      if (pg_norm <= tol) break;
    }
    if (it == kMaxHindsightIterations) {
      throw Error(ErrorCode::kSolverFailed, "hindsight DAC did not reach stationarity", pg_norm);
    }
    out.iterations = it + 1;
  }
  out.projected_gradient_norm = pg_norm;

  out.policy.K_stab = cls.K_stab;
  out.policy.H = cls.H;
  out.policy.theta = cls.theta;
  out.policy.gamma_prime = cls.gamma_prime;
  out.policy.M = unflatten(theta, cls.H, n, m);
  DacController replay(sys, out.policy);
  out.cost = rollout(sys, replay, w).total_cost;
  return out;
}

}  // namespace compctrl
