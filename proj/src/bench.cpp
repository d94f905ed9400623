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

#include "compctrl/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <memory>

#include "compctrl/classic_control.hpp"
#include "compctrl/dac.hpp"
#include "compctrl/errors.hpp"
#include "compctrl/noise.hpp"

namespace compctrl {
namespace {

constexpr double kRatioFloor = 1e-12;
constexpr std::size_t kMaxTailSteps = 10'000'000;

std::string fmt17(double v) {
  if (std::isnan(v)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Solvers shared by every trial, computed on first use.
class SolverCache {
 public:
  explicit SolverCache(const ExperimentConfig& config) : config_(config) {}

  const RiccatiSolution& dare() {
    if (!dare_) dare_ = solve_dare(config_.system);
    return *dare_;
  }
  const HinfSolution& hinf() {
    if (!hinf_) hinf_ = solve_hinf(config_.system, config_.hinf_tol);
    return *hinf_;
  }
  const CompetitiveSolution& competitive() {
    if (!comp_) comp_ = compute_alpha_star(config_.system, config_.alpha_tol);
    return *comp_;
  }
  const AssumptionAudit& audit() {
    if (!audit_) audit_ = audit_assumption(config_.system, competitive());
    return *audit_;
  }
  const GpcConfig& gpc() {
    if (!gpc_) {
      const CompetitiveSolution* comp =
          config_.gpc.stabilizer == GpcStabilizer::kCompetitive ? &competitive() : nullptr;
      gpc_ = make_gpc_config(config_.system, config_.gpc, comp);
    }
    return *gpc_;
  }
  const DacPolicy& dac() {
    if (!dac_) {
      const auto& sys = config_.system;
      const AssumptionAudit& a = audit();
      const int H = config_.dac_H ? *config_.dac_H
                                  : horizon_for_epsilon(config_.dac_eps, sys.W, a.kappa, a.gamma,
                                                        sys.beta, static_cast<double>(config_.T));
      dac_ = competitive_to_dac(sys, competitive(), H, a);
    }
    return *dac_;
  }
  bool has_competitive() const { return comp_.has_value(); }

 private:
  const ExperimentConfig& config_;
  std::optional<RiccatiSolution> dare_;
  std::optional<HinfSolution> hinf_;
  std::optional<CompetitiveSolution> comp_;
  std::optional<AssumptionAudit> audit_;
  std::optional<GpcConfig> gpc_;
  std::optional<DacPolicy> dac_;
};

Trajectory run_controller(ControllerId id, SolverCache& cache, const ExperimentConfig& config,
                          std::span<const Vector> w, const Trajectory& offline) {
  const LtiSystem& sys = config.system;
  switch (id) {
    case ControllerId::kOffline:
      return offline;
    case ControllerId::kH2: {
      LinearController c(cache.dare().K);
      return rollout(sys, c, w);
    }
    case ControllerId::kHinf: {
      LinearController c(cache.hinf().riccati.K);
      return rollout(sys, c, w);
    }
    case ControllerId::kCompetitive: {
      CompetitiveRuntime c(sys, cache.competitive());
      return rollout(sys, c, w);
    }
    case ControllerId::kGpc: {
      GpcController c(sys, cache.gpc());
      return rollout(sys, c, w);
    }
    case ControllerId::kDacOfCompetitive: {
      DacController c(sys, cache.dac());
      return rollout(sys, c, w);
    }
  }
  throw Error(ErrorCode::kInternalInconsistency, "unhandled controller id");
}

void append_rows(std::vector<ResultRow>& rows, const std::string& name, int trial,
                 const Trajectory& traj, const std::vector<double>& opt_prefix) {
  double cum = 0.0;
  for (std::size_t k = 0; k < traj.step_costs.size(); ++k) {
    ResultRow row;
    row.controller = name;
    row.trial = trial;
    row.t = k + 1;
    row.cost = traj.step_costs[k];
    cum += row.cost;
    row.cum_cost = cum;
    if (opt_prefix[k] >= kRatioFloor) row.cum_ratio = cum / opt_prefix[k];
    rows.push_back(std::move(row));
  }
}

ResultRow error_row(const std::string& name, int trial, const std::string& what) {
  ResultRow row;
  row.controller = name;
  row.trial = trial;
  row.t = 0;
  row.cost = std::numeric_limits<double>::quiet_NaN();
  row.cum_cost = row.cost;
  row.cum_ratio = row.cost;
  row.error = what;
  return row;
}

void ensure_open(const std::ofstream& out, const std::filesystem::path& path) {
  if (!out) throw Error(ErrorCode::kIo, "cannot write " + path.string());
}

}  // namespace

GpcConfig make_gpc_config(const LtiSystem& sys, const GpcSettings& settings,
                          const CompetitiveSolution* comp) {
  GpcConfig cfg;
  cfg.H = settings.H;
  cfg.eta = settings.eta;
  cfg.schedule = settings.schedule;
  cfg.K_stab = comp ? comp->K_hat_0 : solve_dare(sys).K;
  const StabilityCertificate cert = stability_certificate(sys, cfg.K_stab);
  cfg.gamma_prime = cert.gamma;
  cfg.theta = settings.theta ? *settings.theta
                             : 2.0 * cert.kappa * cert.kappa * std::max(1.0, std::sqrt(sys.beta));
  validate(cfg);
  return cfg;
}

std::vector<Vector> trial_disturbances(const ExperimentConfig& config, int trial) {
  NoiseSpec spec = config.noise;
  spec.seed = config.seed + static_cast<std::uint64_t>(trial);
  return generate(spec, config.T, config.system.state_dim());
}

ExperimentResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
  if (config.controllers.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "at least one controller is required");
  }
  if (config.T < 1) throw Error(ErrorCode::kInvalidConfig, "T must be at least 1");

  SolverCache cache(config);
  ExperimentResult result;
  std::map<std::string, double> worst;

  for (int trial = 0; trial < config.trials; ++trial) {
    const std::vector<Vector> w = trial_disturbances(config, trial);
    const OfflineSolution offline = offline_optimal(config.system, w);
    std::vector<double> opt_prefix(offline.trajectory.step_costs.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < opt_prefix.size(); ++k) {
      acc += offline.trajectory.step_costs[k];
      opt_prefix[k] = acc;
    }

    for (ControllerId id : config.controllers) {
      const std::string name(to_string(id));
      ControllerSummary summary;
      summary.controller = name;
      summary.trial = trial;
      try {
        const Trajectory traj = run_controller(id, cache, config, w, offline.trajectory);
        append_rows(result.rows, name, trial, traj, opt_prefix);
        summary.total_cost = traj.total_cost;
        if (offline.opt_cost >= kRatioFloor) {
          summary.ratio = traj.total_cost / offline.opt_cost;
          auto [it, inserted] = worst.emplace(name, *summary.ratio);
          if (!inserted) it->second = std::max(it->second, *summary.ratio);
        }
      } catch (const Error& e) {
        if (log) *log << "controller " << name << " failed: " << e.what() << '\n';
        result.rows.push_back(error_row(name, trial, e.what()));
        summary.total_cost = std::numeric_limits<double>::quiet_NaN();
        summary.error = e.what();
      }
      result.summaries.push_back(std::move(summary));
    }
  }

  if (cache.has_competitive()) result.alpha_star = cache.competitive().alpha_star;

  // Rows were produced controller-major inside each trial; reorder to
  // (controller order, trial, t).
  std::map<std::string, std::size_t> order;
  for (std::size_t k = 0; k < config.controllers.size(); ++k) {
    order.emplace(std::string(to_string(config.controllers[k])), k);
  }
  std::stable_sort(result.rows.begin(), result.rows.end(),
                   [&](const ResultRow& a, const ResultRow& b) {
                     const auto oa = order.at(a.controller), ob = order.at(b.controller);
                     if (oa != ob) return oa < ob;
                     if (a.trial != b.trial) return a.trial < b.trial;
                     return a.t < b.t;
                   });
  for (ControllerId id : config.controllers) {
    const std::string name(to_string(id));
    if (auto it = worst.find(name); it != worst.end()) result.worst_ratio.emplace_back(name, it->second);
  }
  return result;
}

TailReport tail_bound_check(const LtiSystem& sys, std::span<const Vector> w, const Matrix& K_stab,
                            double threshold) {
  const StabilityCertificate cert = stability_certificate(sys, K_stab);
  const OfflineSolution opt = offline_optimal(sys, w);

  TailReport report;
  report.opt_cost = opt.opt_cost;
  Vector x = opt.trajectory.states.back();
  report.final_state_norm = x.norm();
  report.bound = 2.0 * sys.beta * std::pow(cert.kappa, 4) / (cert.gamma * cert.gamma) *
                 x.squaredNorm();

  const double blowup = 1e12 * std::max(1.0, report.final_state_norm);
  while (x.norm() >= threshold) {
    const Vector u = K_stab * x;
    report.tail_cost += cost(sys, x, u);
    x = sys.A * x + sys.B * u;
    ++report.extension_steps;
    if (!x.allFinite() || x.norm() > blowup || report.extension_steps > kMaxTailSteps) {
      throw Error(ErrorCode::kInternalInconsistency,
                  "state does not decay under a certified stabilizer", report.extension_steps);
    }
  }
  report.extended_cost = report.opt_cost + report.tail_cost;
  report.passed = report.tail_cost <= report.bound;
  return report;
}

void write_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  out << "controller,t,cost,cum_cost,cum_ratio\n";
  for (const ResultRow& r : rows) {
    if (r.trial != 0) continue;
    out << r.controller << ',' << r.t << ',' << fmt17(r.cost) << ',' << fmt17(r.cum_cost) << ',';
    if (r.cum_ratio) out << fmt17(*r.cum_ratio);
    out << '\n';
  }
}

void write_trials_csv(std::ostream& out, const std::vector<ResultRow>& rows) {
  struct Agg {
    double sum = 0.0;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    int count = 0;
  };
  std::vector<std::pair<std::pair<std::string, std::size_t>, Agg>> aggs;
  std::map<std::pair<std::string, std::size_t>, std::size_t> index;
  for (const ResultRow& r : rows) {
    if (r.error) continue;
    const auto key = std::make_pair(r.controller, r.t);
    auto [it, inserted] = index.emplace(key, aggs.size());
    if (inserted) aggs.push_back({key, Agg{}});
    Agg& a = aggs[it->second].second;
    a.sum += r.cum_cost;
    a.lo = std::min(a.lo, r.cum_cost);
    a.hi = std::max(a.hi, r.cum_cost);
    ++a.count;
  }
  out << "controller,t,trials,mean_cum_cost,min_cum_cost,max_cum_cost\n";
  for (const auto& [key, a] : aggs) {
    out << key.first << ',' << key.second << ',' << a.count << ',' << fmt17(a.sum / a.count) << ','
        << fmt17(a.lo) << ',' << fmt17(a.hi) << '\n';
  }
}

void write_svg(std::ostream& out, const std::vector<ResultRow>& rows) {
  constexpr double kWidth = 800, kHeight = 500, kLeft = 70, kRight = 170, kTop = 20, kBottom = 50;
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::vector<std::string> names;
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  double t_max = 1.0, y_max = 0.0;
  for (const ResultRow& r : rows) {
    if (r.trial != 0 || r.error) continue;
    if (!series.count(r.controller)) names.push_back(r.controller);
    series[r.controller].emplace_back(static_cast<double>(r.t), r.cum_cost);
    t_max = std::max(t_max, static_cast<double>(r.t));
    if (std::isfinite(r.cum_cost)) y_max = std::max(y_max, r.cum_cost);
  }
  if (y_max <= 0.0) y_max = 1.0;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double t) { return kLeft + pw * (t_max > 1.0 ? (t - 1.0) / (t_max - 1.0) : 0.0); };
  auto py = [&](double y) { return kTop + ph * (1.0 - std::min(y, y_max) / y_max); };
  char buf[128];

  out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" fill=\"white\"/>\n";
  out << "<g stroke=\"black\" stroke-width=\"1\">\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + ph << "\" x2=\"" << kLeft + pw << "\" y2=\""
      << kTop + ph << "\"/>\n";
  out << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\""
      << kTop + ph << "\"/>\n";
  out << "</g>\n";
  std::snprintf(buf, sizeof buf, "%.4g", y_max);
  out << "<text x=\"" << kLeft - 5 << "\" y=\"" << kTop + 5
      << "\" font-size=\"11\" text-anchor=\"end\">" << buf << "</text>\n";
  out << "<text x=\"" << kLeft - 5 << "\" y=\"" << kTop + ph
      << "\" font-size=\"11\" text-anchor=\"end\">0</text>\n";
  out << "<text x=\"" << kLeft + pw << "\" y=\"" << kTop + ph + 18
      << "\" font-size=\"11\" text-anchor=\"end\">" << static_cast<long long>(t_max) << "</text>\n";
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 12
      << "\" font-size=\"13\" text-anchor=\"middle\">t</text>\n";
  out << "<text x=\"16\" y=\"" << kTop + ph / 2 << "\" font-size=\"13\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 16 " << kTop + ph / 2 << ")\">cumulative cost</text>\n";

  for (std::size_t k = 0; k < names.size(); ++k) {
    const char* color = kColors[k % std::size(kColors)];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (const auto& [t, y] : series[names[k]]) {
      if (!std::isfinite(y)) continue;
      std::snprintf(buf, sizeof buf, "%s%.2f,%.2f", first ? "" : " ", px(t), py(y));
      out << buf;
      first = false;
    }
    out << "\"/>\n";
    const double ly = kTop + 15 + 20 * static_cast<double>(k);
    out << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly << "\" x2=\""
        << kWidth - kRight + 40 << "\" y2=\"" << ly << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << kWidth - kRight + 46 << "\" y=\"" << ly + 4 << "\" font-size=\"12\">"
        << names[k] << "</text>\n";
  }
  out << "</svg>\n";
}

std::filesystem::path trials_csv_path(const std::filesystem::path& csv_path) {
  std::filesystem::path p = csv_path;
  p.replace_filename(csv_path.stem().string() + ".trials.csv");
  return p;
}

void emit_outputs(const std::vector<ResultRow>& rows, const ExperimentConfig& config) {
  if (rows.empty()) throw Error(ErrorCode::kInvalidArgument, "no rows to emit");
  {
    std::ofstream out(config.csv_path, std::ios::binary);
    ensure_open(out, config.csv_path);
    write_csv(out, rows);
    if (!out) throw Error(ErrorCode::kIo, "failed writing " + config.csv_path.string());
  }
  if (config.trials > 1) {
    const auto path = trials_csv_path(config.csv_path);
    std::ofstream out(path, std::ios::binary);
    ensure_open(out, path);
    write_trials_csv(out, rows);
  }
  if (config.svg_path) {
    std::ofstream out(*config.svg_path, std::ios::binary);
    ensure_open(out, *config.svg_path);
    write_svg(out, rows);
  }
}

}  // namespace compctrl
