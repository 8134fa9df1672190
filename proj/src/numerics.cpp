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

#include "beamacq/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

namespace beamacq {

namespace {

void require_square(const CMatrix& a, const char* what) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    std::ostringstream os;
    os << what << ": expected a non-empty square matrix, got " << a.rows() << "x" << a.cols();
    throw NumericsError(os.str());
  }
}

// Reorders ascending solver output into non-increasing order; equal values keep
// their original relative order.
void sort_descending(RVector& values, CMatrix& vectors) {
  std::vector<Index> order(static_cast<std::size_t>(values.size()));
  std::iota(order.begin(), order.end(), Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Index i, Index j) { return values(i) > values(j); });
  RVector v(values.size());
  CMatrix w(vectors.rows(), vectors.cols());
  for (Index k = 0; k < values.size(); ++k) {
    v(k) = values(order[static_cast<std::size_t>(k)]);
    w.col(k) = vectors.col(order[static_cast<std::size_t>(k)]);
  }
  values = std::move(v);
  vectors = std::move(w);
}

}  // namespace

double hermitian_defect(const CMatrix& a) {
  const double norm = a.norm();
  if (norm == 0.0) return 0.0;
  return (a - a.adjoint()).norm() / norm;
}

void normalize_column_phases(CMatrix& v) {
  for (Index c = 0; c < v.cols(); ++c) {
    const double peak = v.col(c).cwiseAbs().maxCoeff();
    if (peak == 0.0) continue;
    Index pick = 0;
    for (Index r = 0; r < v.rows(); ++r) {
      if (std::abs(v(r, c)) >= peak * (1.0 - 1e-12)) {
        pick = r;
        break;
      }
    }
    const cplx z = v(pick, c);
    v.col(c) *= std::conj(z) / std::abs(z);
    v(pick, c) = std::abs(z);
  }
}

HermitianEig hermitian_eig(const CMatrix& a, double hermitian_tol) {
  require_square(a, "hermitian_eig");
  const double defect = hermitian_defect(a);
  if (defect > hermitian_tol) {
    std::ostringstream os;
    os << "hermitian_eig: input is not Hermitian (relative defect " << defect << " > " << hermitian_tol << ")";
    throw NumericsError(os.str());
  }
  const CMatrix sym = 0.5 * (a + a.adjoint());
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(sym);
  if (solver.info() != Eigen::Success) throw NumericsError("hermitian_eig: eigensolver did not converge");
  HermitianEig out{solver.eigenvalues(), solver.eigenvectors()};
  sort_descending(out.values, out.vectors);
  normalize_column_phases(out.vectors);
  return out;
}

GeneralizedEig generalized_eig(const CMatrix& a, const CMatrix& b, Index d,
                               const GeneralizedEigOptions& options) {
  require_square(a, "generalized_eig");
  require_square(b, "generalized_eig");
  const Index n = a.rows();
  if (b.rows() != n) throw NumericsError("generalized_eig: " + options.a_role + " and " + options.b_role + " differ in size");
  if (d < 1 || d > n) throw NumericsError("generalized_eig: requested count outside [1, dim]");
  if (hermitian_defect(a) > 1e-10) throw NumericsError("generalized_eig: " + options.a_role + " is not Hermitian");
  if (hermitian_defect(b) > 1e-10) throw NumericsError("generalized_eig: " + options.b_role + " is not Hermitian");

  CMatrix metric = 0.5 * (b + b.adjoint());
  if (options.jitter > 0.0) {
    const double ridge = options.jitter * metric.trace().real() / static_cast<double>(n);
    metric.diagonal().array() += ridge;
  }

  const RVector spectrum = Eigen::SelfAdjointEigenSolver<CMatrix>(metric, Eigen::EigenvaluesOnly).eigenvalues();
  const double lo = spectrum.minCoeff();
  const double hi = spectrum.maxCoeff();
  if (!(hi > 0.0) || !(lo > 1e-12 * hi)) {
    std::ostringstream os;
    os << "generalized_eig: " << options.b_role << " is not positive definite (min eig " << lo
       << ", max eig " << hi << ")";
    throw NumericsError(os.str());
  }

  Eigen::LLT<CMatrix> chol(metric);
  if (chol.info() != Eigen::Success)
    throw NumericsError("generalized_eig: Cholesky of " + options.b_role + " failed");

  // C = L^{-1} A L^{-H}
  const auto lower = chol.matrixL();
  CMatrix tmp = lower.solve(0.5 * (a + a.adjoint()));
  CMatrix whitened = lower.solve(tmp.adjoint());
  whitened = 0.5 * (whitened + whitened.adjoint()).eval();

  Eigen::SelfAdjointEigenSolver<CMatrix> solver(whitened);
  if (solver.info() != Eigen::Success) throw NumericsError("generalized_eig: eigensolver did not converge");
  RVector values = solver.eigenvalues();
  CMatrix vectors = solver.eigenvectors();
  sort_descending(values, vectors);

  GeneralizedEig out;
  out.values = values.head(d);
  out.vectors = chol.matrixU().solve(vectors.leftCols(d));
  normalize_column_phases(out.vectors);
  return out;
}

CMatrix pseudo_inverse(const CMatrix& a, double rtol) {
  if (!(rtol > 0.0 && rtol < 1.0)) throw NumericsError("pseudo_inverse: rtol must lie in (0, 1)");
  if (a.size() == 0) return CMatrix::Zero(a.cols(), a.rows());
  Eigen::BDCSVD<CMatrix> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const RVector& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? rtol * s(0) : 0.0;
  RVector inv = RVector::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff && s(i) > 0.0) inv(i) = 1.0 / s(i);
  return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

CMatrix solve_hpd(const CMatrix& a, const CMatrix& b) {
  require_square(a, "solve_hpd");
  if (a.rows() != b.rows()) throw NumericsError("solve_hpd: dimension mismatch");
  Eigen::LLT<CMatrix> chol(0.5 * (a + a.adjoint()));
  if (chol.info() != Eigen::Success) throw NumericsError("solve_hpd: matrix is not positive definite");
  return chol.solve(b);
}

CMatrix solve_square(const CMatrix& a, const CMatrix& b) {
  require_square(a, "solve_square");
  if (a.rows() != b.rows()) throw NumericsError("solve_square: dimension mismatch");
  Eigen::FullPivLU<CMatrix> lu(a);
  if (!lu.isInvertible()) throw NumericsError("solve_square: matrix is singular");
  return lu.solve(b);
}

CMatrix orthonormalize_columns(const CMatrix& a) {
  if (a.cols() > a.rows()) throw NumericsError("orthonormalize_columns: more columns than rows");
  Eigen::HouseholderQR<CMatrix> qr(a);
  CMatrix q = qr.householderQ() * CMatrix::Identity(a.rows(), a.cols());
  // Keep each column aligned with the input column it came from.
  const CMatrix r = qr.matrixQR().topRows(a.cols()).triangularView<Eigen::Upper>();
  for (Index c = 0; c < a.cols(); ++c) {
    const cplx diag = r(c, c);
    if (std::abs(diag) > 0.0) q.col(c) *= diag / std::abs(diag);
  }
  return q;
}

CMatrix kron(const CMatrix& a, const CMatrix& b) {
  CMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Index numerical_rank(const CMatrix& a, double rtol) {
  if (a.size() == 0) return 0;
  Eigen::BDCSVD<CMatrix> svd(a);
  const RVector& s = svd.singularValues();
  if (s.size() == 0 || s(0) == 0.0) return 0;
  Index r = 0;
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > rtol * s(0)) ++r;
  return r;
}

}  // namespace beamacq
