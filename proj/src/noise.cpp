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

#include "compctrl/noise.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "compctrl/errors.hpp"

namespace compctrl {
namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ULL;

std::uint64_t mix(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "sin") return NoiseKind::kSin;
  if (name == "sin_amplitude") return NoiseKind::kSinAmplitude;
  if (name == "constant") return NoiseKind::kConstant;
  if (name == "uniform") return NoiseKind::kUniform;
  if (name == "gaussian") return NoiseKind::kGaussian;
  if (name == "gaussian_walk") return NoiseKind::kGaussianWalk;
  throw Error(ErrorCode::kInvalidArgument, "unknown noise kind '" + std::string(name) + "'");
}

std::string_view to_string(NoiseKind kind) {
  switch (kind) {
    case NoiseKind::kSin: return "sin";
    case NoiseKind::kSinAmplitude: return "sin_amplitude";
    case NoiseKind::kConstant: return "constant";
    case NoiseKind::kUniform: return "uniform";
    case NoiseKind::kGaussian: return "gaussian";
    case NoiseKind::kGaussianWalk: return "gaussian_walk";
  }
  return "unknown";
}

bool is_bounded(NoiseKind kind) {
  return kind != NoiseKind::kGaussian && kind != NoiseKind::kGaussianWalk;
}

std::uint64_t CounterRng::next_u64() { return mix(seed_ + (++counter_) * kGoldenGamma); }

double CounterRng::next_uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::next_gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - U lies in (0, 1], keeping the logarithm finite.
  const double u1 = 1.0 - next_uniform();
  const double u2 = next_uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::vector<Vector> generate(const NoiseSpec& spec, std::size_t T, Eigen::Index m) {
  if (T < 1 || m < 1) throw Error(ErrorCode::kInvalidArgument, "T and m must be at least 1");
  std::vector<Vector> w;
  w.reserve(T);
  CounterRng rng(spec.seed);
  const double horizon = static_cast<double>(T);
  const double pi = std::numbers::pi;
  Vector walk = Vector::Zero(m);
  for (std::size_t step = 1; step <= T; ++step) {
    Vector v(m);
    const double t = static_cast<double>(step);
    for (Eigen::Index i = 0; i < m; ++i) {
      const double arg = spec.per_entry_index ? static_cast<double>(i + 1) : t;
      switch (spec.kind) {
        case NoiseKind::kSin: v(i) = std::sin(8.0 * pi * arg / horizon); break;
        case NoiseKind::kSinAmplitude:
          v(i) = std::sin(8.0 * pi * arg / horizon) * std::sin(6.0 * pi * arg / horizon);
          break;
        case NoiseKind::kConstant: v(i) = 1.0; break;
        case NoiseKind::kUniform: v(i) = rng.next_uniform(); break;
        case NoiseKind::kGaussian: v(i) = rng.next_gaussian(); break;
        case NoiseKind::kGaussianWalk:
          walk(i) += rng.next_gaussian();
          v(i) = walk(i);
          break;
      }
    }
    w.push_back(spec.scale * v);
  }
  return w;
}

std::vector<Vector> ball_sequence(std::uint64_t seed, std::size_t T, Eigen::Index m, double W) {
  CounterRng rng(seed);
  std::vector<Vector> w;
  w.reserve(T);
  for (std::size_t t = 0; t < T; ++t) {
    Vector dir(m);
    for (Eigen::Index i = 0; i < m; ++i) dir(i) = rng.next_gaussian();
    const double norm = dir.norm();
    const double radius = W * std::pow(rng.next_uniform(), 1.0 / static_cast<double>(m));
    w.push_back(norm > 0.0 ? Vector(dir * (radius / norm)) : Vector(Vector::Zero(m)));
  }
  return w;
}

void write_trace(std::ostream& out, const std::vector<Vector>& w) {
  const Eigen::Index m = w.empty() ? 0 : w.front().size();
  out << 't';
  for (Eigen::Index i = 1; i <= m; ++i) out << ",w_" << i;
  out << '\n';
  char buf[40];
  for (std::size_t t = 0; t < w.size(); ++t) {
    out << (t + 1);
    for (Eigen::Index i = 0; i < m; ++i) {
      std::snprintf(buf, sizeof buf, "%.17g", w[t](i));
      out << ',' << buf;
    }
    out << '\n';
  }
}

std::vector<Vector> read_trace(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::kIo, "empty disturbance trace");
  Eigen::Index m = 0;
  for (char c : line) m += (c == ',');
  if (line.rfind("t,", 0) != 0 || m < 1) throw Error(ErrorCode::kIo, "bad trace header: " + line);
  std::vector<Vector> w;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::getline(ss, cell, ',');
    const long t = std::strtol(cell.c_str(), nullptr, 10);
    if (t != static_cast<long>(w.size()) + 1) {
      throw Error(ErrorCode::kIo, "trace rows must be numbered consecutively from 1");
    }
    Vector v(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (!std::getline(ss, cell, ',')) throw Error(ErrorCode::kIo, "short trace row " + std::to_string(t));
      char* end = nullptr;
      v(i) = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str()) throw Error(ErrorCode::kIo, "bad number in trace: " + cell);
    }
    w.push_back(std::move(v));
  }
  return w;
}

void save_trace(const std::filesystem::path& path, const std::vector<Vector>& w) {
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_trace(out, w);
}

std::vector<Vector> load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_trace(in);
}

}  // namespace compctrl
