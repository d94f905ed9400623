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

#ifndef COMPCTRL_ERRORS_HPP
#define COMPCTRL_ERRORS_HPP

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace compctrl {

enum class ErrorCode {
  kInvalidArgument,
  kNumericDivergence,
  kNotStable,
  kCertificationFailed,
  kSolverFailed,
  kInternalInconsistency,
  kProtocolViolation,
  kIo,
  kInvalidConfig,
};

const char* to_string(ErrorCode code);

// Every failure raised by the library. Solver failures carry the residual
// reached; divergence errors carry the step index at which the state stopped
// being finite.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  Error(ErrorCode code, const std::string& what, double residual);
  Error(ErrorCode code, const std::string& what, std::size_t step);

  ErrorCode code() const { return code_; }
  std::optional<double> residual() const { return residual_; }
  std::optional<std::size_t> step() const { return step_; }

 private:
  ErrorCode code_;
  std::optional<double> residual_;
  std::optional<std::size_t> step_;
};

}  // namespace compctrl

#endif  // COMPCTRL_ERRORS_HPP
