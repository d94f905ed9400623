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

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "compctrl/bench.hpp"
#include "compctrl/classic_control.hpp"
#include "compctrl/errors.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace compctrl;

namespace {

ExperimentConfig small_config(std::size_t T = 60) {
  ExperimentConfig c;
  c.T = T;
  c.noise.kind = NoiseKind::kGaussian;
  c.seed = 5;
  c.csv_path = std::filesystem::temp_directory_path() / "compctrl_bench_test.csv";
  return c;
}

std::string csv_of(const ExperimentResult& r) {
  std::ostringstream out;
  write_csv(out, r.rows);
  return out.str();
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("zero disturbance costs nothing for every controller") {
  ExperimentConfig c = small_config(40);
  c.noise.kind = NoiseKind::kConstant;
  c.noise.scale = 0.0;
  const ExperimentResult r = run_experiment(c);
  CHECK(r.rows.size() == 40 * all_controllers().size());
  for (const ResultRow& row : r.rows) {
    CHECK(row.cost == 0.0);
    CHECK_FALSE(row.cum_ratio.has_value());
  }
}

TEST_CASE("rows are complete, monotone and ordered") {
  const ExperimentConfig c = small_config();
  const ExperimentResult r = run_experiment(c);
  REQUIRE(r.rows.size() == c.T * c.controllers.size());
  for (std::size_t k = 0; k < r.rows.size(); ++k) {
    const ResultRow& row = r.rows[k];
    CHECK(row.controller == std::string(to_string(c.controllers[k / c.T])));
    CHECK(row.t == k % c.T + 1);
    if (row.t > 1) CHECK(row.cum_cost >= r.rows[k - 1].cum_cost);
  }
  REQUIRE(r.alpha_star.has_value());
}

TEST_CASE("final ratio equals J_T / OPT and offline dominates") {
  const ExperimentConfig c = small_config(120);
  const ExperimentResult r = run_experiment(c);
  const auto w = trial_disturbances(c, 0);
  const double opt = offline_optimal(c.system, w).opt_cost;
  for (const ControllerSummary& s : r.summaries) {
    REQUIRE(s.ratio.has_value());
    CHECK(std::abs(*s.ratio - s.total_cost / opt) <= 1e-10 * *s.ratio);
    CHECK(s.total_cost >= opt * (1 - 1e-12));
  }
  for (const ResultRow& row : r.rows) {
    if (row.t == c.T) {
      REQUIRE(row.cum_ratio.has_value());
      CHECK(std::abs(*row.cum_ratio - row.cum_cost / opt) <= 1e-10 * *row.cum_ratio);
    }
  }
  CHECK(r.worst_ratio.size() == c.controllers.size());
}

TEST_CASE("same seed gives byte-identical CSV, independent of the output path") {
  ExperimentConfig a = small_config();
  const std::string first = csv_of(run_experiment(a));
  const std::string second = csv_of(run_experiment(a));
  CHECK(first == second);

  const auto dir = std::filesystem::temp_directory_path() / "compctrl_bench_paths";
  std::filesystem::create_directories(dir);
  const ExperimentResult r = run_experiment(a);
  a.csv_path = dir / "one.csv";
  emit_outputs(r.rows, a);
  a.csv_path = dir / "two.csv";
  emit_outputs(r.rows, a);
  CHECK(slurp(dir / "one.csv") == slurp(dir / "two.csv"));
  CHECK(slurp(dir / "one.csv") == first);
  std::filesystem::remove_all(dir);

  ExperimentConfig other = small_config();
  other.seed = 6;
  CHECK(csv_of(run_experiment(other)) != first);
}

TEST_CASE("one controller for two steps") {
  ExperimentConfig c = small_config(2);
  c.controllers = {ControllerId::kH2};
  const std::string csv = csv_of(run_experiment(c));
  std::istringstream in(csv);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  CHECK(lines == 3);
  CHECK(csv.rfind("controller,t,cost,cum_cost,cum_ratio\n", 0) == 0);
}

TEST_CASE("a failing controller yields an error row and the rest proceed") {
  ExperimentConfig c = small_config(20);
  Matrix A(2, 2);
  A << 1.5, 0, 0, 0.5;
  Matrix B(2, 1);
  B << 0, 1;
  c.system = make_system(A, B, Matrix::Identity(2, 2), Matrix::Identity(1, 1));
  c.controllers = {ControllerId::kH2, ControllerId::kOffline};
  std::ostringstream log;
  const ExperimentResult r = run_experiment(c, &log);
  CHECK(log.str().find("h2") != std::string::npos);
  REQUIRE(r.rows.size() == 21);
  CHECK(r.rows.front().error.has_value());
  CHECK(r.rows.front().t == 0);
  CHECK(r.rows.back().controller == "offline");
  CHECK(csv_of(r).find("h2,0,nan,nan,nan\n") != std::string::npos);
}

TEST_CASE("trial aggregation") {
  ExperimentConfig c = small_config(30);
  c.trials = 3;
  c.controllers = {ControllerId::kH2, ControllerId::kOffline};
  const ExperimentResult r = run_experiment(c);
  CHECK(r.rows.size() == 3 * 2 * 30);
  CHECK(r.summaries.size() == 6);
  std::ostringstream out;
  write_trials_csv(out, r.rows);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "controller,t,trials,mean_cum_cost,min_cum_cost,max_cum_cost");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    std::stringstream ss(line);
    std::string name, t, n, mean, lo, hi;
    std::getline(ss, name, ',');
    std::getline(ss, t, ',');
    std::getline(ss, n, ',');
    std::getline(ss, mean, ',');
    std::getline(ss, lo, ',');
    std::getline(ss, hi, ',');
    CHECK(n == "3");
    CHECK(std::stod(lo) <= std::stod(mean) + 1e-9);
    CHECK(std::stod(mean) <= std::stod(hi) + 1e-9);
  }
  CHECK(rows == 60);
  CHECK(trials_csv_path("a/b/run.csv") == std::filesystem::path("a/b/run.trials.csv"));
}

TEST_CASE("SVG output is well-formed XML with one polyline per controller") {
  ExperimentConfig c = small_config(50);
  c.controllers = {ControllerId::kH2, ControllerId::kCompetitive, ControllerId::kOffline};
  const ExperimentResult r = run_experiment(c);
  std::stringstream svg;
  write_svg(svg, r.rows);
  boost::property_tree::ptree tree;
  boost::property_tree::read_xml(svg, tree);
  const auto& root = tree.get_child("svg");
  int polylines = 0, labels = 0;
  for (const auto& [name, child] : root) {
    if (name == "polyline") ++polylines;
    if (name == "text" && (child.data() == "h2" || child.data() == "competitive" || child.data() == "offline")) ++labels;
  }
  CHECK(polylines == 3);
  CHECK(labels == 3);
}

TEST_CASE("unwritable output path is an IO error") {
  ExperimentConfig c = small_config(5);
  c.controllers = {ControllerId::kOffline};
  const ExperimentResult r = run_experiment(c);
  c.csv_path = "/nonexistent_dir/compctrl/out.csv";
  try {
    emit_outputs(r.rows, c);
    FAIL("expected an IO error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kIo);
  }
  CHECK_THROWS_AS(emit_outputs({}, c), Error);
}

TEST_CASE("tail bound") {
  const LtiSystem sys = double_integrator();
  const Matrix K = solve_dare(sys).K;
  std::vector<Vector> zeros(30, Vector::Zero(2));
  const TailReport z = tail_bound_check(sys, zeros, K);
  CHECK(z.tail_cost == 0.0);
  CHECK(z.bound == 0.0);
  CHECK(z.passed);

  std::mt19937_64 rng(10);
  for (int k = 0; k < 10; ++k) {
    const auto w = oracle::random_ball(rng, 100, 2, 1.0);
    const TailReport r = tail_bound_check(sys, w, K);
    CHECK(r.passed);
    CHECK(r.extended_cost == doctest::Approx(r.opt_cost + r.tail_cost));
    const TailReport tight = tail_bound_check(sys, w, K, 1e-14);
    CHECK(tight.passed == r.passed);
    CHECK(tight.tail_cost == doctest::Approx(r.tail_cost).epsilon(1e-12));
  }
  CHECK_THROWS_AS(tail_bound_check(sys, zeros, Matrix::Zero(1, 2)), Error);
}

TEST_CASE("GPC settings resolve to a valid configuration") {
  const LtiSystem sys = double_integrator();
  const GpcConfig dare = make_gpc_config(sys, GpcSettings{}, nullptr);
  CHECK((dare.K_stab - solve_dare(sys).K).norm() == 0.0);
  CHECK(dare.theta > 0.0);
  GpcSettings s;
  s.theta = 3.0;
  const CompetitiveSolution comp = compute_alpha_star(sys);
  const GpcConfig c = make_gpc_config(sys, s, &comp);
  CHECK(c.theta == 3.0);
  CHECK((c.K_stab - comp.K_hat_0).norm() == 0.0);
}
