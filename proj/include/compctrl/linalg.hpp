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

// Small dense linear-algebra helpers shared by the solvers. All matrix norms
// used in bounds are spectral norms (largest singular value).

#ifndef COMPCTRL_LINALG_HPP
#define COMPCTRL_LINALG_HPP

#include <Eigen/Dense>

namespace compctrl {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using ComplexMatrix = Eigen::MatrixXcd;

double spectral_norm(const Matrix& m);
double spectral_norm(const ComplexMatrix& m);

// Largest eigenvalue modulus of a square matrix.
double spectral_radius(const Matrix& m);

// Ratio of largest to smallest singular value; +inf when singular.
double condition_number(const ComplexMatrix& m);

bool is_symmetric(const Matrix& m, double rel_tol = 1e-12);

// Symmetric square root through the eigendecomposition. Negative eigenvalues
// (roundoff on PSD input) are clamped to zero.
Matrix sym_sqrt(const Matrix& m);

// Inverse square root of a symmetric positive-definite matrix.
Matrix sym_inv_sqrt(const Matrix& m);

double min_eigenvalue(const Matrix& sym);
double max_eigenvalue(const Matrix& sym);

bool all_finite(const Matrix& m);

// Power of a square matrix by repeated squaring; exponent 0 gives identity.
Matrix matrix_power(const Matrix& m, int exponent);

}  // namespace compctrl

#endif  // COMPCTRL_LINALG_HPP
