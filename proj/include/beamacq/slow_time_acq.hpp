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

// Slow-time beam acquisition: sector and fine beams, AMF/MF joint angle-delay
// power profile (JADPP) estimation, two-stage CFAR and detection metrics.

#include "beamacq/scenario.hpp"
#include "beamacq/signals.hpp"

#include <vector>

namespace beamacq {

struct AngularGrid {
  double min_deg = 0.0;
  double cell_deg = 0.0;
  std::vector<double> angles_deg;

  int size() const { return static_cast<int>(angles_deg.size()); }
  // argmin_i |phi - angle_i|, ties to the lower index.
  int nearest(double phi_deg) const;
};

AngularGrid make_grid(const Scenario& s);

// N x M matrix whose column i is u(angle_i).
CMatrix steering_table(const ArrayConfig& array, const AngularGrid& grid);

// Top-D eigenvectors of the integral of u u^H over [lo, hi].
CMatrix sector_beamformer(const ArrayConfig& array, double lo_deg, double hi_deg, int D,
                          int min_quad_points = 256);

// ||U U^H u(phi)||^2 for each phi (U semi-orthonormal).
std::vector<double> captured_energy(const ArrayConfig& array, const CMatrix& u_rf,
                                    const std::vector<double>& angles_deg);

// Top-D_search eigenvectors of U_RF^H (integral over phi +- sigma/2 of u u^H) U_RF.
CMatrix fine_beams(const ArrayConfig& array, const CMatrix& u_rf, double phi_deg, double sigma_deg,
                   int d_search, int quad_points = 64);

enum class JadppMethod { amf, mf };
const char* method_name(JadppMethod m);
JadppMethod parse_method(const std::string& name);

// AMF with the interference-plus-noise covariance estimated from the
// signal-nulled observation. Near-singular Psi gets logged diagonal loading.
cplx amf_estimate(const CMatrix& y_tilde, const CVector& u_tilde, const CVector& x);

// Same formula with a caller-supplied Psi (Psi = I reduces it to the MF).
cplx amf_estimate_with_psi(const CMatrix& y_tilde, const CVector& u_tilde, const CVector& x,
                           const CMatrix& psi);

cplx mf_estimate(const CMatrix& y_tilde, const CVector& u_tilde, const CVector& x);

// Per-angle gains for many pilots at once. Column c of `pilots` is one shifted
// pilot; returns one alpha per column. The AMF path uses a rank-one downdate
// of the common Gram matrix and falls back to amf_estimate per column when
// that is ill conditioned.
std::vector<cplx> batch_estimate(const CMatrix& y_tilde, const CVector& u_tilde, const CMatrix& pilots,
                                 const RVector& pilot_norm2, JadppMethod method);

// Precomputed beams for one scenario geometry.
struct SubSector {
  double lo_deg = 0.0;
  double hi_deg = 0.0;
  int first = 0;  // grid index range [first, last)
  int last = 0;
  CMatrix u_rf;   // N x D
};

struct SlowTimeFrontEnd {
  AngularGrid grid;
  std::vector<SubSector> sectors;
  std::vector<int> sector_of;       // grid index -> sector
  std::vector<CMatrix> fine;        // grid index -> U_phi (D x D_search)
  std::vector<CMatrix> combined;    // grid index -> U = U_RF U_phi (N x D_search)
  std::vector<CVector> u_tilde;     // grid index -> U^H u(phi_i)

  int n_sectors() const { return static_cast<int>(sectors.size()); }
};

SlowTimeFrontEnd build_front_end(const Scenario& s);

// beta_hat per user as an M x L matrix.
struct Jadpp {
  std::vector<RMatrix> beta;
};

// snapshots[p][j]: N x T observation of the p-th sub-sector repetition.
// users[k] is the pilot slot of the k-th estimated user.
Jadpp estimate_jadpp(const SlowTimeFrontEnd& fe, const std::vector<std::vector<CMatrix>>& snapshots,
                     const PilotSet& pilots, const std::vector<int>& users, int T, JadppMethod method);

// CFAR multipliers: exact CA-CFAR calibration for n_ref exponential cells.
double cfar_multiplier(int n_ref, double p_fa_bar);

struct CfarDecision {
  double threshold = 0.0;
  bool detected = false;
};

// Temporal test of cell l in one angle row (length L).
CfarDecision cfar_temporal(const RVector& row, int l, double p_fa_bar);

// Spatial test of angle i in one delay column (length M) with guard half
// width kappa; edge windows are truncated and the multiplier uses the actual
// reference-cell count.
CfarDecision cfar_spatial(const RVector& column, int i, double p_fa_bar, int kappa);

// kappa = round(guard_deg / (2 cell)).
int guard_half_width(double guard_deg, double cell_deg);

struct SparsityMap {
  std::vector<Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>> maps;  // per user, M x L

  bool user_active(int k) const { return (maps[static_cast<std::size_t>(k)].array() != 0).any(); }
};

SparsityMap build_sparsity_map(const Jadpp& jadpp, double p_fa_bar, int kappa);

struct DetectionMetrics {
  std::vector<double> pd;   // per user; NaN for users with no MPC
  std::vector<double> pfa;  // per user
};

// Single-trial P_D / P_FA contributions; average over trials for the
// probabilities. users[k] describes map k.
DetectionMetrics detection_metrics(const SparsityMap& map, const std::vector<UserSpec>& users,
                                   const AngularGrid& grid, int L);

}  // namespace beamacq
