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

#include "beamacq/slow_time_acq.hpp"

#include "beamacq/kernels.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace beamacq {

int AngularGrid::nearest(double phi_deg) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int i = 0; i < size(); ++i) {
    const double d = std::abs(phi_deg - angles_deg[static_cast<std::size_t>(i)]);
    if (d < best_d) {
      best_d = d;
      best = i;
    }
  }
  return best;
}

AngularGrid make_grid(const Scenario& s) {
  AngularGrid g;
  g.min_deg = s.sector_min_deg;
  g.cell_deg = s.cell_deg();
  g.angles_deg.resize(static_cast<std::size_t>(s.M));
  for (int i = 0; i < s.M; ++i) g.angles_deg[static_cast<std::size_t>(i)] = s.sector_min_deg + i * g.cell_deg;
  return g;
}

CMatrix steering_table(const ArrayConfig& array, const AngularGrid& grid) {
  CMatrix a(array.n_antennas, grid.size());
  for (int i = 0; i < grid.size(); ++i) a.col(i) = steering_vector(array, grid.angles_deg[static_cast<std::size_t>(i)]);
  return a;
}

CMatrix sector_beamformer(const ArrayConfig& array, double lo_deg, double hi_deg, int D, int min_quad_points) {
  const int n = array.n_antennas;
  if (D < 1 || D > n) throw ConfigError("sector_beamformer: D must lie in [1, N]");
  if (!(hi_deg >= lo_deg)) throw ConfigError("sector_beamformer: empty interval");
  const int q = std::max(min_quad_points, static_cast<int>(std::ceil((hi_deg - lo_deg) / 0.05)));
  CMatrix r = CMatrix::Zero(n, n);
  for (int i = 0; i < q; ++i) {
    const CVector u = steering_vector(array, lo_deg + (hi_deg - lo_deg) * (i + 0.5) / q);
    kernels::her_update({r.data(), static_cast<std::size_t>(r.size())}, {u.data(), static_cast<std::size_t>(n)}, 1.0 / q);
  }
  return hermitian_eig(r).vectors.leftCols(D);
}

std::vector<double> captured_energy(const ArrayConfig& array, const CMatrix& u_rf,
                                    const std::vector<double>& angles_deg) {
  std::vector<double> out;
  out.reserve(angles_deg.size());
  for (double phi : angles_deg) out.push_back((u_rf.adjoint() * steering_vector(array, phi)).squaredNorm());
  return out;
}

CMatrix fine_beams(const ArrayConfig& array, const CMatrix& u_rf, double phi_deg, double sigma_deg, int d_search,
                   int quad_points) {
  const Index d = u_rf.cols();
  if (d_search < 1 || d_search > d) throw ConfigError("fine_beams: D_search must lie in [1, D]");
  const int q = sigma_deg > 0.0 ? quad_points : 1;
  CMatrix r = CMatrix::Zero(d, d);
  for (int i = 0; i < q; ++i) {
    const double phi = q == 1 ? phi_deg : phi_deg - 0.5 * sigma_deg + sigma_deg * (i + 0.5) / q;
    const CVector v = u_rf.adjoint() * steering_vector(array, phi);
    kernels::her_update({r.data(), static_cast<std::size_t>(r.size())}, {v.data(), static_cast<std::size_t>(d)}, 1.0 / q);
  }
  return orthonormalize_columns(hermitian_eig(r).vectors.leftCols(d_search));
}

const char* method_name(JadppMethod m) { return m == JadppMethod::amf ? "amf" : "mf"; }

JadppMethod parse_method(const std::string& name) {
  if (name == "amf" || name == "AMF") return JadppMethod::amf;
  if (name == "mf" || name == "MF") return JadppMethod::mf;
  throw ConfigError("unknown JADPP method \"" + name + "\" (expected amf or mf)");
}

namespace {

// Applies the diagonal loading rule when Psi is numerically singular.
CMatrix condition_psi(const CMatrix& psi) {
  const Index d = psi.rows();
  const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(psi, Eigen::EigenvaluesOnly).eigenvalues();
  const double hi = ev.maxCoeff();
  const double lo = ev.minCoeff();
  if (hi > 0.0 && lo > hi * 1e-12) return psi;
  const double trace = psi.trace().real();
  const double delta = 1e-9 * (trace > 0.0 ? trace : 1.0) / static_cast<double>(d);
  spdlog::warn("AMF: interference estimate ill conditioned (eig range [{:.3e}, {:.3e}]); diagonal loading {:.3e}",
               lo, hi, delta);
  CMatrix loaded = psi;
  loaded.diagonal().array() += delta;
  return loaded;
}

}  // namespace

cplx amf_estimate_with_psi(const CMatrix& y_tilde, const CVector& u_tilde, const CVector& x, const CMatrix& psi) {
  const double n = x.squaredNorm();
  if (!(n > 0.0)) throw NumericsError("amf_estimate: pilot has zero energy");
  Eigen::LDLT<CMatrix> ldlt(0.5 * (psi + psi.adjoint()));
  const CVector a = ldlt.solve(u_tilde);
  const cplx num = a.dot(y_tilde * x);
  const cplx den = a.dot(u_tilde);
  if (std::abs(den) == 0.0) throw NumericsError("amf_estimate: steering vector lies in the null space of Psi");
  return num / (n * den);
}

cplx amf_estimate(const CMatrix& y_tilde, const CVector& u_tilde, const CVector& x) {
  const double n = x.squaredNorm();
  if (!(n > 0.0)) throw NumericsError("amf_estimate: pilot has zero energy");
  const CVector z = y_tilde * x;
  const CMatrix psi = y_tilde * y_tilde.adjoint() - z * z.adjoint() / n;
  return amf_estimate_with_psi(y_tilde, u_tilde, x, condition_psi(psi));
}

cplx mf_estimate(const CMatrix& y_tilde, const CVector& u_tilde, const CVector& x) {
  const double n = x.squaredNorm();
  const double uu = u_tilde.squaredNorm();
  if (!(n > 0.0) || !(uu > 0.0)) throw NumericsError("mf_estimate: zero-energy steering vector or pilot");
  const CVector z = y_tilde * x;
  return kernels::cdotc({u_tilde.data(), static_cast<std::size_t>(u_tilde.size())},
                        {z.data(), static_cast<std::size_t>(z.size())}) /
         (uu * n);
}

std::vector<cplx> batch_estimate(const CMatrix& y_tilde, const CVector& u_tilde, const CMatrix& pilots,
                                 const RVector& pilot_norm2, JadppMethod method) {
  const Index cols = pilots.cols();
  std::vector<cplx> out(static_cast<std::size_t>(cols));
  const CMatrix z = y_tilde * pilots;
  if (method == JadppMethod::mf) {
    const double uu = u_tilde.squaredNorm();
    const CVector proj = z.adjoint() * u_tilde;  // conj(u^H z)
    for (Index c = 0; c < cols; ++c) out[static_cast<std::size_t>(c)] = std::conj(proj(c)) / (uu * pilot_norm2(c));
    return out;
  }
  const CMatrix gram = y_tilde * y_tilde.adjoint();
  Eigen::LLT<CMatrix> llt(gram);
  bool batch_ok = llt.info() == Eigen::Success;
  if (batch_ok) {
    const RVector ev = Eigen::SelfAdjointEigenSolver<CMatrix>(gram, Eigen::EigenvaluesOnly).eigenvalues();
    batch_ok = ev.minCoeff() > 1e-12 * ev.maxCoeff();
  }
  CVector a;
  CMatrix gz;
  cplx ua{};
  if (batch_ok) {
    a = llt.solve(u_tilde);
    gz = llt.solve(z);
    ua = u_tilde.dot(a);
  }
  for (Index c = 0; c < cols; ++c) {
    const double n = pilot_norm2(c);
    bool done = false;
    if (batch_ok) {
      const double q = z.col(c).dot(gz.col(c)).real();
      const double slack = n - q;
      if (slack > 1e-10 * n) {
        const cplx az = a.dot(z.col(c));
        const cplx num = az * (n / slack);
        const cplx den = ua + std::norm(az) / slack;
        out[static_cast<std::size_t>(c)] = num / (n * den);
        done = true;
      }
    }
    if (!done) out[static_cast<std::size_t>(c)] = amf_estimate(y_tilde, u_tilde, pilots.col(c));
  }
  return out;
}

SlowTimeFrontEnd build_front_end(const Scenario& s) {
  SlowTimeFrontEnd fe;
  fe.grid = make_grid(s);
  const double width = s.sector_max_deg - s.sector_min_deg;
  int count = 1;
  if (s.sub_sector_deg > 0.0 && s.sub_sector_deg < width)
    count = static_cast<int>(std::ceil(width / s.sub_sector_deg - 1e-9));
  const double w = width / count;
  const int m = fe.grid.size();
  fe.sector_of.assign(static_cast<std::size_t>(m), 0);
  for (int i = 0; i < m; ++i) {
    int p = static_cast<int>(std::floor((fe.grid.angles_deg[static_cast<std::size_t>(i)] - s.sector_min_deg) / w + 1e-9));
    fe.sector_of[static_cast<std::size_t>(i)] = std::clamp(p, 0, count - 1);
  }
  for (int p = 0; p < count; ++p) {
    SubSector sec;
    sec.lo_deg = s.sector_min_deg + p * w;
    sec.hi_deg = sec.lo_deg + w;
    sec.first = m;
    sec.last = 0;
    for (int i = 0; i < m; ++i)
      if (fe.sector_of[static_cast<std::size_t>(i)] == p) {
        sec.first = std::min(sec.first, i);
        sec.last = std::max(sec.last, i + 1);
      }
    if (sec.first >= sec.last) sec.first = sec.last = 0;
    sec.u_rf = sector_beamformer(s.array, sec.lo_deg, sec.hi_deg, s.D);
    fe.sectors.push_back(std::move(sec));
  }
  fe.fine.resize(static_cast<std::size_t>(m));
  fe.combined.resize(static_cast<std::size_t>(m));
  fe.u_tilde.resize(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    const double phi = fe.grid.angles_deg[static_cast<std::size_t>(i)];
    const CMatrix& u_rf = fe.sectors[static_cast<std::size_t>(fe.sector_of[static_cast<std::size_t>(i)])].u_rf;
    fe.fine[static_cast<std::size_t>(i)] = fine_beams(s.array, u_rf, phi, s.look_spread_deg, s.D_search);
    fe.combined[static_cast<std::size_t>(i)] = u_rf * fe.fine[static_cast<std::size_t>(i)];
    fe.u_tilde[static_cast<std::size_t>(i)] = fe.combined[static_cast<std::size_t>(i)].adjoint() * steering_vector(s.array, phi);
  }
  return fe;
}

Jadpp estimate_jadpp(const SlowTimeFrontEnd& fe, const std::vector<std::vector<CMatrix>>& snapshots,
                     const PilotSet& pilots, const std::vector<int>& users, int T, JadppMethod method) {
  if (static_cast<int>(snapshots.size()) != fe.n_sectors())
    throw ConfigError("estimate_jadpp: need one snapshot list per sub-sector");
  const int L = pilots.L;
  const int K = static_cast<int>(users.size());
  const int m = fe.grid.size();
  CMatrix xp(T, static_cast<Index>(K) * L);
  RVector norms(xp.cols());
  for (int k = 0; k < K; ++k)
    for (int l = 0; l < L; ++l) {
      xp.col(k * L + l) = shifted_pilot(pilots, users[static_cast<std::size_t>(k)], l, T);
      norms(k * L + l) = xp.col(k * L + l).squaredNorm();
    }
  Jadpp out;
  out.beta.assign(static_cast<std::size_t>(K), RMatrix::Zero(m, L));
  for (int p = 0; p < fe.n_sectors(); ++p) {
    const auto& sec = fe.sectors[static_cast<std::size_t>(p)];
    const auto& snaps = snapshots[static_cast<std::size_t>(p)];
    if (snaps.empty()) throw ConfigError("estimate_jadpp: sub-sector without snapshots");
    const double w = 1.0 / static_cast<double>(snaps.size());
    for (const auto& y : snaps) {
      if (y.cols() != T) throw ConfigError("estimate_jadpp: snapshot length differs from T");
      const CMatrix y_rf = sec.u_rf.adjoint() * y;
      for (int i = sec.first; i < sec.last; ++i) {
        const CMatrix y_tilde = fe.fine[static_cast<std::size_t>(i)].adjoint() * y_rf;
        std::vector<cplx> alpha;
        try {
          alpha = batch_estimate(y_tilde, fe.u_tilde[static_cast<std::size_t>(i)], xp, norms, method);
        } catch (const NumericsError& e) {
          throw NumericsError(std::string(e.what()) + " (angle " +
                              std::to_string(fe.grid.angles_deg[static_cast<std::size_t>(i)]) + " deg)");
        }
        for (int k = 0; k < K; ++k) {
          auto& b = out.beta[static_cast<std::size_t>(k)];
          for (int l = 0; l < L; ++l) b(i, l) += w * std::norm(alpha[static_cast<std::size_t>(k * L + l)]);
        }
      }
    }
  }
  return out;
}

}  // namespace beamacq
