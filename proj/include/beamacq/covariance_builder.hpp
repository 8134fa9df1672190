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

// Parametric channel covariances from the sparsity map and JADPP.

#include "beamacq/scenario.hpp"
#include "beamacq/slow_time_acq.hpp"

namespace beamacq {

// Zero when no cell of column l is detected, otherwise
// sum_i beta_hat(i, l) / c_l * I(i, l) * u_i u_i^H with c_l the detection count.
// `steering` is the N x M grid steering table.
CMatrix build_mpc_ccm(const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& map,
                      const RMatrix& beta, const CMatrix& steering, int l);

// [user][delay] estimated covariances for every user in the map.
std::vector<std::vector<CMatrix>> build_user_ccms(const SparsityMap& map, const Jadpp& jadpp,
                                                  const CMatrix& steering);

// Group-delay, received and interference covariances from per-user ones.
GroupCovariances build_group_covariances(const std::vector<std::vector<CMatrix>>& per_user,
                                         const std::vector<int>& user_group, int n_groups, double noise_power);

// Eigenvalues (descending) of a covariance, for inspection dumps.
RVector covariance_spectrum(const CMatrix& r);

}  // namespace beamacq
