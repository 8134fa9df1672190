// SPDX-License-Identifier: Apache-2.0
//
// beamacq: slow-time beam acquisition and fast-time channel estimation
// for wideband hybrid-beamforming massive MIMO
// Copyright (C) 2026 The beamacq authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

// Dense complex linear algebra used throughout the simulator.

#include <Eigen/Dense>

#include <complex>
#include <stdexcept>
#include <string>

namespace beamacq {

using cplx = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;
using Index = Eigen::Index;

// Raised for malformed or numerically unusable inputs (non-Hermitian operand,
// indefinite metric, dimension mismatch).
class NumericsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Eigenvalues in non-increasing order, eigenvectors as matching orthonormal
// columns. Each column's largest-magnitude entry is real and nonnegative.
struct HermitianEig {
  RVector values;
  CMatrix vectors;
};

// Top-d solutions of A v = lambda B v, lambda non-increasing. Columns are
// B-orthonormal (v^H B v = 1) with the same phase convention as HermitianEig.
struct GeneralizedEig {
  RVector values;
  CMatrix vectors;
};

struct GeneralizedEigOptions {
  // Ridge eps * Tr(B)/n * I added to B before factorization. Zero disables it.
  double jitter = 0.0;
  // Names used in diagnostics, e.g. "R_l^(g)" and "R_y".
  std::string a_role = "A";
  std::string b_role = "B";
};

// ||A - A^H||_F / ||A||_F (0 for the zero matrix).
double hermitian_defect(const CMatrix& a);

HermitianEig hermitian_eig(const CMatrix& a, double hermitian_tol = 1e-10);

GeneralizedEig generalized_eig(const CMatrix& a, const CMatrix& b, Index d,
                               const GeneralizedEigOptions& options = {});

// Moore-Penrose inverse; singular values <= rtol * sigma_max are dropped.
CMatrix pseudo_inverse(const CMatrix& a, double rtol = 1e-12);

// Solves A X = B for Hermitian positive definite A.
CMatrix solve_hpd(const CMatrix& a, const CMatrix& b);

// Solves A X = B for general square A (partial-pivot LU); throws if singular.
CMatrix solve_square(const CMatrix& a, const CMatrix& b);

// Thin-QR orthonormal basis of the columns of a (same column count).
CMatrix orthonormalize_columns(const CMatrix& a);

// Kronecker product a (x) b.
CMatrix kron(const CMatrix& a, const CMatrix& b);

// Numerical rank with relative singular-value cutoff.
Index numerical_rank(const CMatrix& a, double rtol = 1e-10);

// Multiplies each column by a unit phasor so its largest-magnitude entry is
// real and nonnegative (first such entry on ties).
void normalize_column_phases(CMatrix& v);

}  // namespace beamacq
