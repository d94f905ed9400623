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

// Disturbance generators for benchmarks. Stochastic kinds draw from a
// counter-based SplitMix64 stream, so a (seed, T, m) triple reproduces the
// same sequence bit for bit on every platform.

#ifndef COMPCTRL_NOISE_HPP
#define COMPCTRL_NOISE_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "compctrl/linalg.hpp"

namespace compctrl {

enum class NoiseKind { kSin, kSinAmplitude, kConstant, kUniform, kGaussian, kGaussianWalk };

NoiseKind parse_noise_kind(std::string_view name);  // throws kInvalidArgument
std::string_view to_string(NoiseKind kind);

// Kinds whose entries stay within [-scale, scale].
bool is_bounded(NoiseKind kind);

struct NoiseSpec {
  NoiseKind kind = NoiseKind::kSin;
  std::uint64_t seed = 0;
  double scale = 1.0;
  // Reads the sine argument as the entry index i instead of the time step t.
  bool per_entry_index = false;
};

// SplitMix64 in counter form: draw k is mix(seed + (k + 1) * golden_gamma).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}
  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double next_uniform();
  // Standard normal by Box-Muller; the second variate of each pair is cached.
  double next_gaussian();

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

// w_1 .. w_T, each of dimension m:
//   sin           every entry sin(8 pi t / T)
//   sin_amplitude every entry sin(8 pi t / T) sin(6 pi t / T)
//   constant      all ones
//   uniform       i.i.d. U[0, 1)
//   gaussian      i.i.d. N(0, I)
//   gaussian_walk w_t ~ N(w_{t-1}, I), w_0 = 0
// All multiplied by spec.scale.
std::vector<Vector> generate(const NoiseSpec& spec, std::size_t T, Eigen::Index m);

// Uniform samples from the ball of radius W (norm-bounded disturbances).
std::vector<Vector> ball_sequence(std::uint64_t seed, std::size_t T, Eigen::Index m, double W);

// CSV with header `t,w_1,...,w_m`, t starting at 1.
void write_trace(std::ostream& out, const std::vector<Vector>& w);
std::vector<Vector> read_trace(std::istream& in);
void save_trace(const std::filesystem::path& path, const std::vector<Vector>& w);
std::vector<Vector> load_trace(const std::filesystem::path& path);

}  // namespace compctrl

#endif  // COMPCTRL_NOISE_HPP
