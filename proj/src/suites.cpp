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

#include "compctrl/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "compctrl/bench.hpp"
#include "compctrl/classic_control.hpp"
#include "compctrl/competitive.hpp"
#include "compctrl/dac.hpp"
#include "compctrl/errors.hpp"
#include "compctrl/gpc.hpp"
#include "compctrl/noise.hpp"

namespace compctrl {
namespace {

std::string format(const char* fmt, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, fmt, args...);
  return buf;
}

struct Prepared {
  LtiSystem sys = double_integrator();
  CompetitiveSolution comp;
  AssumptionAudit audit;
};

Prepared prepare() {
  Prepared p;
  p.comp = compute_alpha_star(p.sys);
  p.audit = audit_assumption(p.sys, p.comp);
  return p;
}

struct RegretPoint {
  double gpc = 0.0;
  double hindsight = 0.0;
  double opt = 0.0;
  double alpha_star = 0.0;
  double regret() const { return gpc - hindsight; }
};

RegretPoint measure_regret(const LtiSystem& sys, double alpha_star, std::size_t T) {
  const GpcConfig cfg = make_gpc_config(sys, GpcSettings{}, nullptr);
  NoiseSpec spec;
  spec.kind = NoiseKind::kSin;
  const std::vector<Vector> w = generate(spec, T, sys.state_dim());
  GpcController gpc(sys, cfg);
  RegretPoint p;
  p.gpc = rollout(sys, gpc, w).total_cost;
  p.hindsight = best_dac_in_hindsight(sys, w, DacClass{cfg.H, cfg.theta, cfg.gamma_prime, cfg.K_stab}).cost;
  p.opt = offline_optimal(sys, w).opt_cost;
  p.alpha_star = alpha_star;
  return p;
}

CheckResult failure(std::string name, const Error& e) {
  return {std::move(name), false, std::string("error: ") + e.what()};
}

}  // namespace

CheckResult check_truncation_envelopes(int runs, std::uint64_t seed) {
  const std::string name = "truncation envelopes";
  try {
    const Prepared p = prepare();
    const double kappa = p.audit.kappa, gamma = p.audit.gamma;
    const double q_norm = spectral_norm(p.sys.Q);
    const std::size_t T = 200;
    const int horizons[] = {2, 4, 8, 16};
    double prev_x = 0.0, prev_u = 0.0, min_shrink = INFINITY;
    bool ok = true;
    std::string detail;
    for (int H : horizons) {
      const DacPolicy policy = competitive_to_dac(p.sys, p.comp, H, p.audit);
      const double bx = state_gap_bound(p.sys.W, kappa, gamma, q_norm, H);
      const double bu = action_gap_bound(p.sys.W, kappa, gamma, q_norm, H);
      double gx = 0.0, gu = 0.0;
      for (int r = 0; r < runs; ++r) {
        const auto w = ball_sequence(seed + static_cast<std::uint64_t>(r), T, p.sys.state_dim(), p.sys.W);
        CompetitiveRuntime comp(p.sys, p.comp);
        DacController dac(p.sys, policy);
        const Trajectory a = rollout(p.sys, comp, w);
        const Trajectory b = rollout(p.sys, dac, w);
        for (std::size_t t = 0; t < T; ++t) {
          const double ex = (a.states[t + 1] - b.states[t + 1]).norm();
          const double eu = (a.controls[t] - b.controls[t]).norm();
          gx = std::max(gx, ex);
          gu = std::max(gu, eu);
          if (ex > bx || eu > bu) ok = false;
        }
      }
      if (prev_x > 0.0) {
        const double shrink = std::min(prev_x / gx, prev_u / gu);
        min_shrink = std::min(min_shrink, shrink);
        if (!(shrink >= 1.5)) ok = false;
      }
      prev_x = gx;
      prev_u = gu;
      detail += format("H=%d gap_x=%.3e (bound %.3e) gap_u=%.3e (bound %.3e); ", H, gx, bx, gu, bu);
    }
    detail += format("min shrink per doubling %.3g", min_shrink);
    return {name, ok, detail};
  } catch (const Error& e) {
    return failure(name, e);
  }
}

CheckResult check_dac_state_envelope(int policies, int seeds, std::uint64_t seed) {
  const std::string name = "DAC state envelope";
  try {
    const LtiSystem sys = double_integrator();
    const Matrix K = solve_dare(sys).K;
    const StabilityCertificate cert = stability_certificate(sys, K);
    CounterRng rng(seed);
    const std::size_t T = 200;
    double worst = 0.0;
    bool ok = true;
    for (int k = 0; k < policies; ++k) {
      DacPolicy policy;
      policy.K_stab = K;
      policy.H = 1 + static_cast<int>(rng.next_uniform() * 6.0);
      policy.theta = 0.5 + 2.5 * rng.next_uniform();
      policy.gamma_prime = 0.1 + 0.4 * rng.next_uniform();
      for (int i = 0; i < policy.H; ++i) {
        Matrix Mi(sys.input_dim(), sys.state_dim());
        for (Eigen::Index r = 0; r < Mi.rows(); ++r)
          for (Eigen::Index c = 0; c < Mi.cols(); ++c) Mi(r, c) = rng.next_gaussian();
        const double radius = policy.theta * std::pow(1.0 - policy.gamma_prime, i);
        policy.M.push_back(Mi * (radius / spectral_norm(Mi)));
      }
      const double bound = dac_state_bound(policy, sys.W, cert.kappa, cert.gamma);
      for (int s = 0; s < seeds; ++s) {
        const auto w = ball_sequence(seed * 1000 + static_cast<std::uint64_t>(k * seeds + s), T,
                                     sys.state_dim(), sys.W);
        DacController c(sys, policy);
        const Trajectory traj = rollout(sys, c, w);
        for (std::size_t t = 0; t < T; ++t) {
          const double v = std::max(traj.states[t].norm(), traj.controls[t].norm());
          worst = std::max(worst, v / bound);
          if (v > bound) ok = false;
        }
      }
    }
    return {name, ok, format("%d policies x %d seeds, worst norm/bound %.3e", policies, seeds, worst)};
  } catch (const Error& e) {
    return failure(name, e);
  }
}

CheckResult check_geometric_inequality() {
  const double gammas[] = {0.01, 0.05, 0.1, 0.25, 0.5};
  int violations = 0, checked = 0;
  for (double g : gammas) {
    for (int i = 0; i <= 200; ++i) {
      ++checked;
      if (i * std::pow(1.0 - g, i) > 2.0 * std::pow(1.0 - g / 2.0, i) / g) ++violations;
    }
  }
  return {"geometric inequality", violations == 0,
          format("%d cases, %d violations", checked, violations)};
}

CheckResult check_cost_gap(const std::vector<double>& eps, int runs, std::size_t T,
                           std::uint64_t seed) {
  const std::string name = "cost gap";
  try {
    const Prepared p = prepare();
    bool ok = true;
    std::string detail;
    for (double e : eps) {
      const int H = horizon_for_epsilon(e, p.sys.W, p.audit.kappa, p.audit.gamma, p.sys.beta,
                                        static_cast<double>(T));
      const DacPolicy policy = competitive_to_dac(p.sys, p.comp, H, p.audit);
      double worst = 0.0;
      for (int r = 0; r < runs; ++r) {
        const auto w = ball_sequence(seed + static_cast<std::uint64_t>(r), T, p.sys.state_dim(), p.sys.W);
        CompetitiveRuntime comp(p.sys, p.comp);
        DacController dac(p.sys, policy);
        const double gap =
            std::abs(rollout(p.sys, dac, w).total_cost - rollout(p.sys, comp, w).total_cost);
        worst = std::max(worst, gap);
        if (!(gap < e)) ok = false;
      }
      detail += format("eps=%g H=%d worst gap %.3e; ", e, H, worst);
    }
    return {name, ok, detail};
  } catch (const Error& e) {
    return failure(name, e);
  }
}

CheckResult check_general_cost_gap(double eps, int runs, std::size_t T, std::uint64_t seed) {
  const std::string name = "general stabilizer cost gap";
  try {
    const Prepared p = prepare();
    const Matrix K = solve_dare(p.sys).K;
    const GeneralConstants c = general_constants(p.sys, p.comp, K);
    const int H = horizon_for_epsilon_general(eps, p.sys.W, c.kappa, c.gamma, p.sys.beta,
                                              static_cast<double>(T));
    const DacPolicy policy = competitive_to_dac_general(p.sys, p.comp, K, H);
    double worst = 0.0;
    bool ok = true;
    for (int r = 0; r < runs; ++r) {
      const auto w = ball_sequence(seed + static_cast<std::uint64_t>(r), T, p.sys.state_dim(), p.sys.W);
      CompetitiveRuntime comp(p.sys, p.comp);
      DacController dac(p.sys, policy);
      const double gap =
          std::abs(rollout(p.sys, dac, w).total_cost - rollout(p.sys, comp, w).total_cost);
      worst = std::max(worst, gap);
      if (!(gap < eps)) ok = false;
    }
    return {name, ok, format("eps=%g H=%d worst gap %.3e", eps, H, worst)};
  } catch (const Error& e) {
    return failure(name, e);
  }
}

CheckResult check_sublinear_regret() {
  const std::string name = "sublinear regret";
  try {
    const LtiSystem sys = double_integrator();
    const RegretPoint a = measure_regret(sys, 0.0, 500);
    const RegretPoint b = measure_regret(sys, 0.0, 2000);
    const double ra = a.regret() / 500.0, rb = b.regret() / 2000.0;
    return {name, rb < ra,
            format("R(500)/500=%.6g R(2000)/2000=%.6g (gpc %.6g/%.6g, hindsight %.6g/%.6g)", ra, rb,
                   a.gpc, b.gpc, a.hindsight, b.hindsight)};
  } catch (const Error& e) {
    return failure(name, e);
  }
}

CheckResult check_best_of_both_worlds() {
  const std::string name = "best of both worlds";
  try {
    const LtiSystem sys = double_integrator();
    const double alpha = compute_alpha_star(sys).alpha_star;
    const RegretPoint a = measure_regret(sys, alpha, 500);
    const RegretPoint b = measure_regret(sys, alpha, 2000);
    auto slack = [](const RegretPoint& p) { return std::max(0.0, p.regret()) / (p.alpha_star * p.opt); };
    auto ratio = [](const RegretPoint& p) { return p.gpc / (p.alpha_star * p.opt); };
    const bool ok = ratio(a) <= 1.0 + slack(a) && ratio(b) <= 1.0 + slack(b) && slack(b) < slack(a);
    return {name, ok,
            format("T=500 ratio %.4g slack %.4g; T=2000 ratio %.4g slack %.4g", ratio(a), slack(a),
                   ratio(b), slack(b))};
  } catch (const Error& e) {
    return failure(name, e);
  }
}

CheckResult check_tail(int instances, std::size_t T, std::uint64_t seed) {
  const std::string name = "tail bound";
  try {
    const LtiSystem sys = double_integrator();
    const Matrix K = solve_dare(sys).K;
    bool ok = true;
    double worst = 0.0;
    for (int k = 0; k < instances; ++k) {
      const auto w = ball_sequence(seed + static_cast<std::uint64_t>(k), T, sys.state_dim(), sys.W);
      const TailReport r = tail_bound_check(sys, w, K);
      if (!r.passed) ok = false;
      if (r.bound > 0.0) worst = std::max(worst, r.tail_cost / r.bound);
    }
    return {name, ok, format("%d instances, worst tail/bound %.3e", instances, worst)};
  } catch (const Error& e) {
    return failure(name, e);
  }
}

std::vector<CheckResult> run_suite(std::string_view name) {
  if (name == "bounds") {
    return {check_geometric_inequality(), check_truncation_envelopes(), check_dac_state_envelope(),
            check_cost_gap(), check_general_cost_gap()};
  }
  if (name == "regret") return {check_sublinear_regret(), check_best_of_both_worlds()};
  if (name == "tail") return {check_tail()};
  throw Error(ErrorCode::kInvalidArgument, "unknown suite '" + std::string(name) + "'");
}

}  // namespace compctrl
