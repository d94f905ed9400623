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

#include "compctrl/dac.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "compctrl/errors.hpp"

namespace compctrl {
namespace {

void check_horizon_args(double eps, double kappa, double gamma, double T) {
  if (!(eps > 0.0)) throw Error(ErrorCode::kInvalidArgument, "eps must be positive");
  if (!(gamma > 0.0 && gamma <= 0.5)) {
    throw Error(ErrorCode::kInvalidArgument, "gamma must lie in (0, 1/2]");
  }
  if (!(kappa >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "kappa must be at least 1");
  if (!(T >= 1.0)) throw Error(ErrorCode::kInvalidArgument, "T must be at least 1");
}

int clamp_horizon(double h) {
  if (!std::isfinite(h) || h < 1.0) return 1;
  return static_cast<int>(std::ceil(h));
}

void validate_weights(const DacPolicy& policy) {
  for (int i = 0; i < policy.H; ++i) {
    const double norm = spectral_norm(policy.M[i]);
    const double bound = policy.theta * std::pow(1.0 - policy.gamma_prime, i);
    if (norm > bound + 1e-9) {
      throw Error(ErrorCode::kInternalInconsistency,
                  "weight " + std::to_string(i) + " has norm " + std::to_string(norm) +
                      " above the class bound " + std::to_string(bound));
    }
  }
}

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_matrix(std::ostream& out, const Matrix& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      if (c) out << ' ';
      out << fmt17(m(r, c));
    }
    out << '\n';
  }
}

std::string next_token(std::istream& in) {
  std::string tok;
  if (!(in >> tok)) throw Error(ErrorCode::kIo, "unexpected end of policy file");
  return tok;
}

void expect(std::istream& in, const std::string& word) {
  const std::string tok = next_token(in);
  if (tok != word) throw Error(ErrorCode::kIo, "expected '" + word + "', found '" + tok + "'");
}

double read_double(std::istream& in) {
  const std::string tok = next_token(in);
  char* end = nullptr;
  const double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0') throw Error(ErrorCode::kIo, "bad number '" + tok + "'");
  return v;
}

long read_int(std::istream& in) {
  const std::string tok = next_token(in);
  char* end = nullptr;
  const long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0') throw Error(ErrorCode::kIo, "bad integer '" + tok + "'");
  return v;
}

Matrix read_matrix(std::istream& in, long rows, long cols) {
  Matrix m(rows, cols);
  for (long r = 0; r < rows; ++r)
    for (long c = 0; c < cols; ++c) m(r, c) = read_double(in);
  return m;
}

}  // namespace

bool in_class(const DacPolicy& policy, double slack) {
  if (static_cast<int>(policy.M.size()) != policy.H) return false;
  for (int i = 0; i < policy.H; ++i) {
    if (spectral_norm(policy.M[i]) > policy.theta * std::pow(1.0 - policy.gamma_prime, i) + slack) {
      return false;
    }
  }
  return true;
}

Vector dac_action(const DacPolicy& policy, const Vector& x, std::span<const Vector> history) {
  if (x.size() != policy.K_stab.cols()) {
    throw Error(ErrorCode::kInvalidArgument, "state has the wrong dimension for this policy");
  }
  Vector u = policy.K_stab * x;
  const std::size_t terms = std::min<std::size_t>(policy.M.size(), history.size());
  for (std::size_t i = 0; i < terms; ++i) {
    if (history[i].size() != policy.M[i].cols()) {
      throw Error(ErrorCode::kInvalidArgument, "disturbance has the wrong dimension");
    }
    u.noalias() += policy.M[i] * history[i];
  }
  return u;
}

DacController::DacController(const LtiSystem& sys, DacPolicy policy)
    : A_(sys.A), B_(sys.B), policy_(std::move(policy)) {
  history_.assign(policy_.M.size(), Vector::Zero(A_.rows()));
  last_x_ = Vector::Zero(A_.rows());
  last_u_ = Vector::Zero(B_.cols());
}

Vector DacController::act(std::size_t t, const Vector& x) {
  if (t != t_) {
    throw Error(ErrorCode::kProtocolViolation,
                "expected step " + std::to_string(t_) + ", got " + std::to_string(t));
  }
  if (t > 0 && !history_.empty()) {
    std::rotate(history_.rbegin(), history_.rbegin() + 1, history_.rend());
    history_.front() = x - A_ * last_x_ - B_ * last_u_;
  }
  Vector u = dac_action(policy_, x, history_);
  last_x_ = x;
  last_u_ = u;
  ++t_;
  return u;
}

DacPolicy competitive_to_dac(const LtiSystem& sys, const CompetitiveSolution& comp, int H) {
  return competitive_to_dac(sys, comp, H, audit_assumption(sys, comp));
}

DacPolicy competitive_to_dac(const LtiSystem& sys, const CompetitiveSolution& comp, int H,
                             const AssumptionAudit& audit) {
  if (H < 1) throw Error(ErrorCode::kInvalidArgument, "H must be positive");
  const Matrix D = disturbance_gain(comp);
  const Matrix F = filter_dynamics(sys, comp);
  DacPolicy policy;
  policy.K_stab = comp.K_hat_0;
  policy.H = H;
  policy.theta = 2.0 * audit.kappa * audit.kappa * std::max(1.0, std::sqrt(sys.beta));
  policy.gamma_prime = audit.gamma;
  policy.M.reserve(H);
  Matrix weight = D;
  for (int i = 0; i < H; ++i) {
    policy.M.push_back(weight);
    weight = weight * F;
  }
  validate_weights(policy);
  return policy;
}

GeneralConstants general_constants(const LtiSystem& sys, const CompetitiveSolution& comp,
                                   const Matrix& K_stab) {
  const AssumptionAudit audit = audit_assumption(sys, comp);
  GeneralConstants c;
  c.stabilizer = stability_certificate(sys, K_stab);
  c.kappa = std::max(audit.kappa, c.stabilizer.kappa);
  c.gamma = std::min(audit.gamma, c.stabilizer.gamma);
  return c;
}

DacPolicy competitive_to_dac_general(const LtiSystem& sys, const CompetitiveSolution& comp,
                                     const Matrix& K_stab, int H) {
  if (H < 1) throw Error(ErrorCode::kInvalidArgument, "H must be positive");
  if (K_stab.rows() != sys.input_dim() || K_stab.cols() != sys.state_dim()) {
    throw Error(ErrorCode::kInvalidArgument, "stabilizer has the wrong shape");
  }
  const GeneralConstants constants = general_constants(sys, comp, K_stab);
  const Matrix D = disturbance_gain(comp);
  const Matrix F = filter_dynamics(sys, comp);
  const Matrix G = sys.A + sys.B * comp.K_hat_0;
  const Matrix correction = comp.K_hat_0 - K_stab;
  const Matrix BD = sys.B * D;

  DacPolicy policy;
  policy.K_stab = K_stab;
  policy.H = H;
  policy.theta = 20.0 * std::pow(constants.kappa, 5) * std::sqrt(std::max(1.0, sys.beta)) /
                 constants.gamma;
  policy.gamma_prime = constants.gamma / 2.0;
  policy.M.reserve(H);

  // phi_i = G^{i-1} + sum_{j=1}^{i-1} G^{i-j-1} B D F^{j-1} obeys
  // phi_1 = I, phi_{i+1} = G phi_i + B D F^{i-1}.
  const Eigen::Index m = sys.state_dim();
  Matrix phi = Matrix::Identity(m, m);
  Matrix F_pow = Matrix::Identity(m, m);
  for (int i = 1; i <= H; ++i) {
    policy.M.push_back(D * F_pow + correction * phi);
    phi = G * phi + BD * F_pow;
    F_pow = F_pow * F;
  }
  validate_weights(policy);
  return policy;
}

int horizon_for_epsilon(double eps, double W, double kappa, double gamma, double beta, double T) {
  check_horizon_args(eps, kappa, gamma, T);
  const double ratio = 1088.0 * W * W * std::pow(kappa, 11) * std::max(1.0, beta * beta) * T /
                       (std::pow(gamma, 4) * eps);
  return clamp_horizon(std::log(ratio) / std::log(1.0 / (1.0 - gamma / 2.0)));
}

int horizon_for_epsilon_general(double eps, double W, double kappa, double gamma, double beta,
                                double T) {
  check_horizon_args(eps, kappa, gamma, T);
  const double ratio = 1e5 * beta * beta * W * W * std::pow(kappa, 16) * std::pow(T, 5) /
                       (std::pow(gamma, 4) * eps);
  return clamp_horizon(2.0 * std::log(ratio) / gamma);
}

double dac_state_bound(const DacPolicy& policy, double W, double kappa, double gamma) {
  return 3.0 * std::pow(kappa, 3) * policy.theta * W / (gamma * policy.gamma_prime);
}

double state_gap_bound(double W, double kappa, double gamma, double q_norm, int H) {
  return 16.0 * W * std::pow(kappa, 4) * std::max(1.0, std::sqrt(q_norm)) *
         std::pow(1.0 - gamma / 2.0, H) / (gamma * gamma);
}

double action_gap_bound(double W, double kappa, double gamma, double q_norm, int H) {
  return 20.0 * W * std::pow(kappa, 5) * std::max(1.0, std::sqrt(q_norm)) *
         std::pow(1.0 - gamma / 2.0, H) / (gamma * gamma);
}

void write_policy(std::ostream& out, const DacPolicy& policy) {
  out << "compctrl-dac 1\n";
  out << "dims " << policy.K_stab.cols() << ' ' << policy.K_stab.rows() << ' ' << policy.H << '\n';
  out << "theta " << fmt17(policy.theta) << '\n';
  out << "gamma_prime " << fmt17(policy.gamma_prime) << '\n';
  out << "K_stab\n";
  write_matrix(out, policy.K_stab);
  for (int i = 0; i < policy.H; ++i) {
    out << "M " << i << '\n';
    write_matrix(out, policy.M[i]);
  }
}

DacPolicy read_policy(std::istream& in) {
  expect(in, "compctrl-dac");
  if (read_int(in) != 1) throw Error(ErrorCode::kIo, "unsupported policy format version");
  expect(in, "dims");
  const long m = read_int(in);
  const long n = read_int(in);
  const long H = read_int(in);
  if (m < 1 || n < 1 || H < 0) throw Error(ErrorCode::kIo, "bad policy dimensions");
  DacPolicy policy;
  policy.H = static_cast<int>(H);
  expect(in, "theta");
  policy.theta = read_double(in);
  expect(in, "gamma_prime");
  policy.gamma_prime = read_double(in);
  expect(in, "K_stab");
  policy.K_stab = read_matrix(in, n, m);
  for (long i = 0; i < H; ++i) {
    expect(in, "M");
    if (read_int(in) != i) throw Error(ErrorCode::kIo, "policy weights out of order");
    policy.M.push_back(read_matrix(in, n, m));
  }
  return policy;
}

void save_policy(const std::filesystem::path& path, const DacPolicy& policy) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_policy(out, policy);
  if (!out) throw Error(ErrorCode::kIo, "failed writing " + path.string());
}

DacPolicy load_policy(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_policy(in);
}

}  // namespace compctrl
