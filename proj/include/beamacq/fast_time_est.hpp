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

// Fast-time channel estimation in the reduced beamspace: effective channel,
// RR-MMSE, beamspace-aware LS (BA-LS), conventional LS and analytic nMSE.
//
// Layouts used throughout:
//   effective channel h_bar: index ((k * L) + l) * D_g + d   (user, delay, beam)
//   observation y:           index t * D_g + d               (vec of D_g x T_fast)
//   estimator W:             (T_fast D_g) x (K_g L D_g), estimate = W^H y

#include "beamacq/beam_design.hpp"
#include "beamacq/scenario.hpp"

#include <string>
#include <vector>

namespace beamacq {

enum class EstimatorKind { rr_mmse, ba_ls, ls };
const char* estimator_name(EstimatorKind k);
EstimatorKind parse_estimator(const std::string& name);

// h[k][l] for the group's users; empty or zero-length entries count as zero.
CVector effective_channel(const std::vector<std::vector<CVector>>& h, const CMatrix& s, int L);

// Literal Kronecker assembly of the reduced-rank MMSE estimator from the
// group's per-delay covariances and its interference covariance.
CMatrix rr_mmse_matrix(const CMatrix& x, const std::vector<CMatrix>& per_delay, const CMatrix& r_eta,
                       const CMatrix& s, int L);

// BA-LS from the MPC clusters and their beam column ranges.
CMatrix ba_ls_matrix(const CMatrix& x, const GroupBeamformer& beams, int L, double pinv_rtol = 1e-12);

// Conventional LS (tall or wide branch) Kronecker'd with I_{D_g}.
CMatrix ls_matrix(const CMatrix& x, int d_g);

CVector estimate_channels(const CMatrix& w, const CVector& y);

struct NmseParts {
  double numerator = 0.0;    // E||h - W^H y||^2 given W, S
  double denominator = 0.0;  // E||h||^2 given S
  double ratio() const { return denominator > 0.0 ? numerator / denominator : 0.0; }
};

// Closed-form conditional error of a linear estimator W under the true
// covariances, with the true-covariance Wiener filter as the reference.
NmseParts analytic_nmse(const CMatrix& w, const CMatrix& s, const std::vector<CMatrix>& true_per_delay,
                        const CMatrix& true_r_eta, const CMatrix& x, int L);

}  // namespace beamacq
