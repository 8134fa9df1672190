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

#include "beamacq/covariance_builder.hpp"

#include "beamacq/kernels.hpp"

namespace beamacq {

CMatrix build_mpc_ccm(const Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>& map, const RMatrix& beta,
                      const CMatrix& steering, int l) {
  const Index m = steering.cols();
  const Index n = steering.rows();
  if (map.rows() != m || beta.rows() != m || map.cols() != beta.cols())
    throw ConfigError("build_mpc_ccm: map, JADPP and grid disagree in size");
  if (l < 0 || l >= map.cols()) throw ConfigError("build_mpc_ccm: delay out of range");
  CMatrix r = CMatrix::Zero(n, n);
  int c = 0;
  for (Index i = 0; i < m; ++i) c += map(i, l) != 0;
  if (c == 0) return r;
  for (Index i = 0; i < m; ++i) {
    if (!map(i, l)) continue;
    kernels::her_update({r.data(), static_cast<std::size_t>(r.size())},
                        {steering.col(i).data(), static_cast<std::size_t>(n)}, beta(i, l) / c);
  }
  return r;
}

std::vector<std::vector<CMatrix>> build_user_ccms(const SparsityMap& map, const Jadpp& jadpp, const CMatrix& steering) {
  if (map.maps.size() != jadpp.beta.size()) throw ConfigError("build_user_ccms: map/JADPP user count mismatch");
  std::vector<std::vector<CMatrix>> out(map.maps.size());
  for (std::size_t k = 0; k < map.maps.size(); ++k) {
    const int L = static_cast<int>(map.maps[k].cols());
    out[k].reserve(static_cast<std::size_t>(L));
    for (int l = 0; l < L; ++l) out[k].push_back(build_mpc_ccm(map.maps[k], jadpp.beta[k], steering, l));
  }
  return out;
}

GroupCovariances build_group_covariances(const std::vector<std::vector<CMatrix>>& per_user,
                                         const std::vector<int>& user_group, int n_groups, double noise_power) {
  const int n = per_user.empty() || per_user.front().empty() ? 0 : static_cast<int>(per_user.front().front().rows());
  if (n == 0) throw ConfigError("build_group_covariances: no covariances supplied");
  return assemble_group_covariances(per_user, user_group, n_groups, n, noise_power);
}

RVector covariance_spectrum(const CMatrix& r) { return hermitian_eig(r).values; }

}  // namespace beamacq
