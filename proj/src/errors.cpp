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

#include "compctrl/errors.hpp"

namespace compctrl {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kNumericDivergence: return "numeric-divergence";
    case ErrorCode::kNotStable: return "not-stable";
    case ErrorCode::kCertificationFailed: return "certification-failed";
    case ErrorCode::kSolverFailed: return "solver-failed";
    case ErrorCode::kInternalInconsistency: return "internal-inconsistency";
    case ErrorCode::kProtocolViolation: return "protocol-violation";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kInvalidConfig: return "invalid-config";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

Error::Error(ErrorCode code, const std::string& what, double residual)
    : std::runtime_error(std::string(to_string(code)) + ": " + what +
                         " (residual " + std::to_string(residual) + ")"),
      code_(code),
      residual_(residual) {}

Error::Error(ErrorCode code, const std::string& what, std::size_t step)
    : std::runtime_error(std::string(to_string(code)) + ": " + what + " at step " +
                         std::to_string(step)),
      code_(code),
      step_(step) {}

}  // namespace compctrl
