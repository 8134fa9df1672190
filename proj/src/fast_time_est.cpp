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

#include "beamacq/fast_time_est.hpp"

#include <spdlog/spdlog.h>

namespace beamacq {

const char* estimator_name(EstimatorKind k) {
  switch (k) {
    case EstimatorKind::rr_mmse: return "rr_mmse";
    case EstimatorKind::ba_ls: return "ba_ls";
    case EstimatorKind::ls: return "ls";
  }
  return "?";
}

EstimatorKind parse_estimator(const std::string& name) {
  if (name == "rr_mmse") return EstimatorKind::rr_mmse;
  if (name == "ba_ls") return EstimatorKind::ba_ls;
  if (name == "ls") return EstimatorKind::ls;
  throw ConfigError("unknown estimator \"" + name + "\" (expected rr_mmse, ba_ls or ls)");
}

CVector effective_channel(const std::vector<std::vector<CVector>>& h, const CMatrix& s, int L) {
  const Index dg = s.cols();
  CVector out = CVector::Zero(static_cast<Index>(h.size()) * L * dg);
  for (std::size_t k = 0; k < h.size(); ++k)
    for (int l = 0; l < L && static_cast<std::size_t>(l) < h[k].size(); ++l) {
      if (h[k][static_cast<std::size_t>(l)].size() == 0) continue;
      out.segment((static_cast<Index>(k) * L + l) * dg, dg) = s.adjoint() * h[k][static_cast<std::size_t>(l)];
    }
  return out;
}

namespace {

CMatrix beamspace(const CMatrix& r, const CMatrix& s) {
  CMatrix b = s.adjoint() * r * s;
  return 0.5 * (b + b.adjoint());
}

// Q^{-1} with logged diagonal loading when Q is numerically singular.
CMatrix inverse_interference(const CMatrix& q) {
  const Index d = q.rows();
  const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(q, Eigen::EigenvaluesOnly).eigenvalues();
  CMatrix m = q;
  if (!(ev.minCoeff() > 1e-12 * ev.maxCoeff()) || !(ev.maxCoeff() > 0.0)) {
    const double tr = q.trace().real();
    const double delta = 1e-9 * (tr > 0.0 ? tr : 1.0) / static_cast<double>(d);
    spdlog::warn("RR-MMSE: beamspace interference covariance singular; diagonal loading {:.3e}", delta);
    m.diagonal().array() += delta;
  }
  return solve_hpd(m, CMatrix::Identity(d, d));
}

void check_group_shape(const CMatrix& x, int L, const char* who) {
  if (L < 1 || x.cols() % L != 0)
    throw ConfigError(std::string(who) + ": training matrix width is not a multiple of L");
}

}  // namespace

CMatrix rr_mmse_matrix(const CMatrix& x, const std::vector<CMatrix>& per_delay, const CMatrix& r_eta,
                       const CMatrix& s, int L) {
  check_group_shape(x, L, "rr_mmse_matrix");
  if (static_cast<int>(per_delay.size()) != L) throw ConfigError("rr_mmse_matrix: need one covariance per delay");
  const Index t = x.rows();
  const Index kg = x.cols() / L;
  const Index dg = s.cols();
  const CMatrix q_inv = inverse_interference(beamspace(r_eta, s));
  CMatrix lhs = CMatrix::Identity(t * dg, t * dg);
  CMatrix rhs = CMatrix::Zero(t * dg, kg * L * dg);
  for (int l = 0; l < L; ++l) {
    const CMatrix snr = q_inv * beamspace(per_delay[static_cast<std::size_t>(l)], s);
    if (snr.isZero(0.0)) continue;
    CMatrix xl(t, kg);
    for (Index k = 0; k < kg; ++k) xl.col(k) = x.col(k * L + l);
    const CMatrix code = xl * xl.adjoint();
    for (Index a = 0; a < t; ++a)
      for (Index b = 0; b < t; ++b) lhs.block(a * dg, b * dg, dg, dg) += code(a, b) * snr;
    for (Index a = 0; a < t; ++a)
      for (Index k = 0; k < kg; ++k) rhs.block(a * dg, (k * L + l) * dg, dg, dg) = xl(a, k) * snr;
  }
  return solve_square(lhs, rhs);
}

CMatrix ba_ls_matrix(const CMatrix& x, const GroupBeamformer& beams, int L, double pinv_rtol) {
  check_group_shape(x, L, "ba_ls_matrix");
  const Index t = x.rows();
  const Index kg = x.cols() / L;
  const Index dg = beams.d_g();
  CMatrix w = CMatrix::Zero(t * dg, kg * L * dg);
  if (beams.fallback) return w;
  for (std::size_t c = 0; c < beams.clusters.size(); ++c) {
    const int dc = beams.d[c];
    if (dc == 0) continue;
    CMatrix masked = CMatrix::Zero(kg * L, t);  // [I_K (x) sum E_m] X^H
    for (Index k = 0; k < kg; ++k)
      for (int l : beams.clusters[c]) masked.row(k * L + l) = x.col(k * L + l).adjoint();
    const Index expected = std::min<Index>(kg * static_cast<Index>(beams.clusters[c].size()), t);
    if (numerical_rank(masked) < expected)
      throw NumericsError("ba_ls_matrix: masked pilot block of MPC cluster " + std::to_string(c) +
                          " is rank deficient");
    const CMatrix p = pseudo_inverse(masked, pinv_rtol);  // T x K L
    const int lo = beams.offset[c];
    for (Index a = 0; a < t; ++a)
      for (Index col = 0; col < kg * L; ++col) {
        const cplx v = p(a, col);
        if (v == cplx{}) continue;
        for (int d = lo; d < lo + dc; ++d) w(a * dg + d, col * dg + d) = v;
      }
  }
  return w;
}

CMatrix ls_matrix(const CMatrix& x, int d_g) {
  const Index t = x.rows();
  const Index n = x.cols();
  CMatrix base;
  if (t >= n) {
    if (numerical_rank(x) < n) throw NumericsError("ls_matrix: training matrix lacks full column rank");
    base = x * solve_hpd(x.adjoint() * x, CMatrix::Identity(n, n));
  } else {
    if (numerical_rank(x) < t) throw NumericsError("ls_matrix: training matrix lacks full row rank");
    base = solve_hpd(x * x.adjoint(), x);
  }
  return kron(base, CMatrix::Identity(d_g, d_g));
}

CVector estimate_channels(const CMatrix& w, const CVector& y) {
  if (w.rows() != y.size()) throw ConfigError("estimate_channels: dimension mismatch");
  return w.adjoint() * y;
}

NmseParts analytic_nmse(const CMatrix& w, const CMatrix& s, const std::vector<CMatrix>& true_per_delay,
                        const CMatrix& true_r_eta, const CMatrix& x, int L) {
  check_group_shape(x, L, "analytic_nmse");
  const Index t = x.rows();
  const Index kg = x.cols() / L;
  const Index dg = s.cols();
  if (w.rows() != t * dg || w.cols() != kg * L * dg) throw ConfigError("analytic_nmse: estimator has the wrong shape");
  CMatrix r_y = kron(CMatrix::Identity(t, t), beamspace(true_r_eta, s));
  CMatrix c = CMatrix::Zero(t * dg, kg * L * dg);  // (X (x) I) R_eff
  double tr_eff = 0.0;
  for (int l = 0; l < L; ++l) {
    const CMatrix b = beamspace(true_per_delay[static_cast<std::size_t>(l)], s);
    if (b.isZero(0.0)) continue;
    tr_eff += static_cast<double>(kg) * b.trace().real();
    CMatrix xl(t, kg);
    for (Index k = 0; k < kg; ++k) xl.col(k) = x.col(k * L + l);
    const CMatrix code = xl * xl.adjoint();
    for (Index a = 0; a < t; ++a) {
      for (Index bb = 0; bb < t; ++bb) r_y.block(a * dg, bb * dg, dg, dg) += code(a, bb) * b;
      for (Index k = 0; k < kg; ++k) c.block(a * dg, (k * L + l) * dg, dg, dg) = xl(a, k) * b;
    }
  }
  NmseParts out;
  out.denominator = tr_eff;
  if (tr_eff <= 0.0) return out;
  Eigen::LLT<CMatrix> llt(0.5 * (r_y + r_y.adjoint()));
  if (llt.info() != Eigen::Success) throw NumericsError("analytic_nmse: beamspace observation covariance not PD");
  const CMatrix w_mmse = llt.solve(c);
  const double tr_mmse = tr_eff - (c.adjoint() * w_mmse).trace().real();
  const CMatrix diff = w - w_mmse;
  out.numerator = tr_mmse + (diff.adjoint() * r_y * diff).trace().real();
  return out;
}

}  // namespace beamacq
