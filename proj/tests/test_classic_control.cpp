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

#include "compctrl/classic_control.hpp"
#include "compctrl/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace compctrl;

namespace {

LtiSystem random_system(std::mt19937_64& rng, Eigen::Index m, Eigen::Index n) {
  return make_system(oracle::random_matrix(rng, m, m, 0.6), oracle::random_matrix(rng, m, n),
                     oracle::random_spd(rng, m), oracle::random_spd(rng, n, 0.5));
}

}  // namespace

TEST_CASE("DARE matches structured doubling") {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 30; ++k) {
    const LtiSystem sys = random_system(rng, 3, 2);
    const RiccatiSolution sol = solve_dare(sys);
    const Matrix ref = oracle::sda_dare(sys.A, sys.B, sys.Q, sys.R);
    CHECK((sol.P - ref).norm() <= 1e-8 * (1.0 + ref.norm()));
    CHECK((dare_map(sys, sol.P) - sol.P).norm() <= 1e-8 * (1.0 + sol.P.norm()));
    CHECK(spectral_radius(sys.A + sys.B * sol.K) < 1.0);
  }
}

TEST_CASE("DARE on the double integrator") {
  const LtiSystem sys = double_integrator();
  const RiccatiSolution sol = solve_dare(sys);
  const Matrix ref = oracle::sda_dare(sys.A, sys.B, sys.Q, sys.R);
  CHECK((sol.P - ref).norm() < 1e-8);
  const Matrix K_ref = -(sys.R + sys.B.transpose() * ref * sys.B).inverse() * sys.B.transpose() * ref * sys.A;
  CHECK((sol.K - K_ref).norm() < 1e-8);
}

TEST_CASE("DARE fails on an unstabilizable plant") {
  Matrix A(2, 2);
  A << 1.5, 0, 0, 0.5;
  Matrix B(2, 1);
  B << 0, 1;
  const LtiSystem sys = make_system(A, B, Matrix::Identity(2, 2), Matrix::Identity(1, 1));
  try {
    solve_dare(sys);
    FAIL("expected solver failure");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kSolverFailed);
  }
}

TEST_CASE("H-infinity synthesis") {
  const LtiSystem sys = double_integrator();
  const HinfSolution sol = solve_hinf(sys);
  CHECK(sol.gamma_attained >= sol.gamma_min);
  CHECK(spectral_radius(sys.A + sys.B * sol.riccati.K) < 1.0);
  CHECK_FALSE(hinf_at_level(sys, 0.98 * sol.gamma_min).has_value());
  CHECK(hinf_at_level(sys, 1.5 * sol.gamma_min).has_value());

  // Very loose attenuation recovers the H2 gain.
  const auto loose = hinf_at_level(sys, 1e6);
  REQUIRE(loose.has_value());
  CHECK((loose->K - solve_dare(sys).K).norm() < 1e-5);
  CHECK_THROWS_AS(solve_hinf(sys, 0.0), Error);
}

TEST_CASE("offline optimum agrees with the KKT oracle") {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> dim(1, 3), len(1, 8);
  for (int k = 0; k < 50; ++k) {
    const Eigen::Index m = dim(rng), n = dim(rng);
    const std::size_t T = static_cast<std::size_t>(len(rng));
    const LtiSystem sys = random_system(rng, m, n);
    const auto w = oracle::random_ball(rng, T, m, 1.0);
    const OfflineSolution sol = offline_optimal(sys, w);
    const oracle::KktResult ref = oracle::kkt_offline(sys, w);
    CHECK(std::abs(sol.opt_cost - ref.cost) <= 1e-8 * std::max(1.0, ref.cost));
    CHECK(sol.trajectory.total_cost == doctest::Approx(sol.opt_cost));
    for (int trial = 0; trial < 50; ++trial) {
      std::vector<Vector> u;
      for (std::size_t t = 0; t < T; ++t) u.push_back(oracle::random_matrix(rng, n, 1));
      CHECK(oracle::open_loop_cost(sys, u, w) >= sol.opt_cost - 1e-9);
    }
  }
}

TEST_CASE("offline optimum with no disturbance costs nothing") {
  const LtiSystem sys = double_integrator();
  std::vector<Vector> w(20, Vector::Zero(2));
  CHECK(offline_optimal(sys, w).opt_cost == 0.0);
  CHECK_THROWS_AS(offline_optimal(sys, std::vector<Vector>{}), Error);
}

TEST_CASE("offline optimum dominates the linear controllers") {
  const LtiSystem sys = double_integrator();
  std::mt19937_64 rng(9);
  const auto w = oracle::random_ball(rng, 200, 2, 1.0);
  const double opt = offline_optimal(sys, w).opt_cost;
  LinearController h2(solve_dare(sys).K);
  LinearController hinf(solve_hinf(sys).riccati.K);
  CHECK(opt <= rollout(sys, h2, w).total_cost);
  CHECK(opt <= rollout(sys, hinf, w).total_cost);
}
