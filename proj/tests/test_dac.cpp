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

#include <cmath>
#include <random>
#include <sstream>

#include "compctrl/classic_control.hpp"
#include "compctrl/competitive.hpp"
#include "compctrl/dac.hpp"
#include "compctrl/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace compctrl;

TEST_CASE("weights follow D F^(i-1)") {
  const LtiSystem sys = double_integrator();
  const CompetitiveSolution c = compute_alpha_star(sys);
  const DacPolicy p = competitive_to_dac(sys, c, 6);
  const auto& f = c.filter;
  const Matrix D = c.K_hat_1 * f.Sigma_inv_sqrt * f.Q_sqrt - c.K_hat_0;
  const Matrix F = sys.A - f.K * f.Q_sqrt;
  for (int i = 0; i < 6; ++i) CHECK((p.M[i] - D * matrix_power(F, i)).norm() < 1e-12);
  CHECK(in_class(p));
  CHECK((p.K_stab - c.K_hat_0).norm() == 0.0);
}

TEST_CASE("DAC image approaches the competitive controller") {
  const LtiSystem sys = double_integrator();
  const CompetitiveSolution c = compute_alpha_star(sys);
  std::mt19937_64 rng(31);
  const auto w = oracle::random_ball(rng, 150, 2, 1.0);
  CompetitiveRuntime comp(sys, c);
  const double target = rollout(sys, comp, w).total_cost;
  double prev = INFINITY;
  for (int H : {1, 2, 4, 8, 16, 32}) {
    DacController dac(sys, competitive_to_dac(sys, c, H));
    const double gap = std::abs(rollout(sys, dac, w).total_cost - target);
    CHECK(gap <= prev + 1e-9);
    prev = gap;
  }
  CHECK(prev < 1e-6);
}

TEST_CASE("general construction with K_hat_0 reduces to the plain one") {
  const LtiSystem sys = double_integrator();
  const CompetitiveSolution c = compute_alpha_star(sys);
  const DacPolicy plain = competitive_to_dac(sys, c, 10);
  const DacPolicy general = competitive_to_dac_general(sys, c, c.K_hat_0, 10);
  for (int i = 0; i < 10; ++i) CHECK((plain.M[i] - general.M[i]).norm() < 1e-12);
}

TEST_CASE("general construction with the DARE gain") {
  const LtiSystem sys = double_integrator();
  const CompetitiveSolution c = compute_alpha_star(sys);
  const Matrix K = solve_dare(sys).K;
  const GeneralConstants k = general_constants(sys, c, K);
  const int H = 60;
  const DacPolicy p = competitive_to_dac_general(sys, c, K, H);
  for (int i = 0; i < H; ++i) {
    const double bound = 20.0 * std::pow(k.kappa, 5) * std::sqrt(sys.beta) *
                         std::pow(1.0 - k.gamma / 2.0, i) / k.gamma;
    CHECK(spectral_norm(p.M[i]) <= bound);
  }
  std::mt19937_64 rng(17);
  const auto w = oracle::random_ball(rng, 200, 2, 1.0);
  CompetitiveRuntime comp(sys, c);
  DacController dac(sys, p);
  CHECK(std::abs(rollout(sys, dac, w).total_cost - rollout(sys, comp, w).total_cost) < 1e-6);
  CHECK_THROWS_AS(competitive_to_dac_general(sys, c, Matrix::Zero(1, 2), 5), Error);
  CHECK_THROWS_AS(competitive_to_dac_general(sys, c, K, 0), Error);
}

TEST_CASE("horizon formula by direct arithmetic") {
  // 1088 * 2^11 * 1000 / 0.5^4, log base 4/3, rounded up.
  const double ratio = 1088.0 * 2048.0 * 1000.0 * 16.0;
  const int expected = static_cast<int>(std::ceil(std::log10(ratio) / std::log10(4.0 / 3.0)));
  CHECK(horizon_for_epsilon(1.0, 1.0, 2.0, 0.5, 1.0, 1000.0) == expected);
  CHECK(expected == 85);

  const double general_ratio = 1e5 * 1.0 * std::pow(2.0, 16) * std::pow(1000.0, 5) * 16.0;
  CHECK(horizon_for_epsilon_general(1.0, 1.0, 2.0, 0.5, 1.0, 1000.0) ==
        static_cast<int>(std::ceil(4.0 * std::log(general_ratio))));
}

TEST_CASE("horizon monotonicity and log additivity") {
  const double gamma = 0.3;
  const int step = static_cast<int>(std::ceil(std::log(2.0) / std::log(1.0 / (1.0 - gamma / 2.0))));
  int prev_eps = 1 << 30;
  for (double eps : {0.01, 0.1, 1.0, 10.0}) {
    const int h = horizon_for_epsilon(eps, 1.0, 3.0, gamma, 2.0, 500.0);
    CHECK(h <= prev_eps);
    prev_eps = h;
  }
  for (double T : {10.0, 100.0, 1000.0}) {
    const int h1 = horizon_for_epsilon(0.5, 1.0, 3.0, gamma, 2.0, T);
    const int h2 = horizon_for_epsilon(0.5, 1.0, 3.0, gamma, 2.0, 2.0 * T);
    CHECK(h2 >= h1);
    CHECK(h2 - h1 <= step);
    CHECK(h2 - h1 >= step - 1);
    const int g1 = horizon_for_epsilon_general(0.5, 1.0, 3.0, gamma, 2.0, T);
    const int g2 = horizon_for_epsilon_general(0.5, 1.0, 3.0, gamma, 2.0, 2.0 * T);
    CHECK(g2 >= g1);
  }
  CHECK_THROWS_AS(horizon_for_epsilon(0.0, 1, 2, 0.5, 1, 10), Error);
  CHECK_THROWS_AS(horizon_for_epsilon(-1.0, 1, 2, 0.5, 1, 10), Error);
  CHECK_THROWS_AS(horizon_for_epsilon(1.0, 1, 2, 0.7, 1, 10), Error);
  CHECK_THROWS_AS(horizon_for_epsilon_general(0.0, 1, 2, 0.5, 1, 10), Error);
}

TEST_CASE("state bound arithmetic and the zero-noise case") {
  DacPolicy p;
  p.K_stab = solve_dare(double_integrator()).K;
  p.H = 2;
  p.theta = 1.0;
  p.gamma_prime = 0.5;
  p.M = {Matrix::Constant(1, 2, 0.3), Matrix::Constant(1, 2, 0.1)};
  CHECK(dac_state_bound(p, 1.0, 1.0, 0.5) == doctest::Approx(12.0));
  CHECK(dac_state_bound(p, 0.0, 3.0, 0.5) == 0.0);

  const LtiSystem sys = double_integrator();
  DacController c(sys, p);
  std::vector<Vector> w(30, Vector::Zero(2));
  const Trajectory traj = rollout(sys, c, w);
  for (const Vector& x : traj.states) CHECK(x.norm() == 0.0);
  for (const Vector& u : traj.controls) CHECK(u.norm() == 0.0);
}

TEST_CASE("dac_action sums the available history") {
  DacPolicy p;
  p.K_stab = Matrix::Constant(1, 2, 1.0);
  p.H = 3;
  p.M = {Matrix::Constant(1, 2, 1.0), Matrix::Constant(1, 2, 10.0), Matrix::Constant(1, 2, 100.0)};
  Vector x(2);
  x << 1, 2;
  const std::vector<Vector> hist = {Vector::Constant(2, 1.0), Vector::Constant(2, 0.5)};
  CHECK(dac_action(p, x, hist)(0) == doctest::Approx(3.0 + 2.0 + 10.0));
  CHECK(dac_action(p, x, std::vector<Vector>{})(0) == doctest::Approx(3.0));
  CHECK_THROWS_AS(dac_action(p, Vector::Zero(3), hist), Error);
}

TEST_CASE("class membership") {
  DacPolicy p;
  p.K_stab = Matrix::Zero(1, 2);
  p.H = 2;
  p.theta = 1.0;
  p.gamma_prime = 0.5;
  p.M = {Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 0.5)};
  CHECK(in_class(p));
  p.M[1](0, 0) = 0.51;
  CHECK_FALSE(in_class(p));
  p.M.pop_back();
  CHECK_FALSE(in_class(p));
}

TEST_CASE("DAC controller enforces step order") {
  const LtiSystem sys = double_integrator();
  DacController c(sys, competitive_to_dac(sys, compute_alpha_star(sys), 3));
  c.act(0, Vector::Zero(2));
  CHECK_THROWS_AS(c.act(2, Vector::Zero(2)), Error);
}

TEST_CASE("policy text round trip is bit exact") {
  const LtiSystem sys = double_integrator();
  const DacPolicy p = competitive_to_dac(sys, compute_alpha_star(sys), 7);
  std::stringstream ss;
  write_policy(ss, p);
  const DacPolicy q = read_policy(ss);
  CHECK(q.H == p.H);
  CHECK(q.theta == p.theta);
  CHECK(q.gamma_prime == p.gamma_prime);
  CHECK((q.K_stab - p.K_stab).norm() == 0.0);
  for (int i = 0; i < p.H; ++i) CHECK((q.M[i] - p.M[i]).norm() == 0.0);

  std::stringstream again;
  write_policy(again, q);
  std::stringstream first;
  write_policy(first, p);
  CHECK(again.str() == first.str());

  std::stringstream bad("compctrl-dac 1\ndims 2 1\n");
  CHECK_THROWS_AS(read_policy(bad), Error);
  CHECK_THROWS_AS(load_policy("/nonexistent/dir/policy.txt"), Error);
}
