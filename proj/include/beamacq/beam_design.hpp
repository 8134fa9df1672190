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

// Post-grouping analog beamformer: MPC clustering, RF-chain distribution and
// generalized-eigenvector beams.

#include "beamacq/scenario.hpp"
#include "beamacq/slow_time_acq.hpp"

#include <vector>

namespace beamacq {

// Per delay, the sorted grid indices detected for any member of a group.
std::vector<std::vector<int>> group_support(const SparsityMap& map, const std::vector<int>& members, int L);

// |A n B| / min(|A|, |B|) for sorted index sets (0 if either is empty).
double overlap_ratio(const std::vector<int>& a, const std::vector<int>& b);

// Connected components of the overlap graph (edge iff ratio >= zeta) over the
// delays with non-empty support. Each cluster is a sorted delay list; clusters
// are ordered by their smallest delay.
std::vector<std::vector<int>> cluster_mpcs(const std::vector<std::vector<int>>& support, double zeta);

// Largest-remainder split of D proportional to the user counts, ties to the
// lower group index.
std::vector<int> allocate_group_chains(int D, const std::vector<int>& users_per_group);

enum class FloorPolicy { adaptive, strict };
FloorPolicy parse_floor_policy(const std::string& name);

// sum over clusters of sum_{n < d_l} 1 / (lambda_{l,n} + 1)
double allocation_cost(const std::vector<RVector>& lambdas, const std::vector<int>& d);

// Greedy minimizer of allocation_cost with sum d = D_g. Each cluster first
// receives one chain when D_g covers every cluster; "strict" rejects the
// opposite case, "adaptive" then starts all clusters from zero. Remaining
// chains go to the globally largest next eigenvalue, ties to the lower
// cluster index. lambdas[l] must be non-increasing.
std::vector<int> allocate_rf_chains(const std::vector<RVector>& lambdas, int d_g, FloorPolicy policy);

struct GroupBeamformer {
  CMatrix s;                                  // N x D_g, orthonormal columns
  std::vector<std::vector<int>> clusters;     // delays per cluster
  std::vector<int> d;                         // chains per cluster
  std::vector<int> offset;                    // first column of each cluster block
  std::vector<RVector> lambdas;               // eigenvalues of (R_l, R_y - R_l)
  double leakage = 0.0;                       // worst cross-cluster leakage before QR
  bool fallback = false;                      // no clusters: acquisition beams used

  int d_g() const { return static_cast<int>(s.cols()); }
};

// per_delay: the group's R_l (L entries); r_y: received covariance.
// `fallback` supplies at least D_g orthonormal columns for groups without
// detected MPCs.
GroupBeamformer build_statistical_beamformer(const std::vector<std::vector<int>>& clusters,
                                             const std::vector<CMatrix>& per_delay, const CMatrix& r_y, int d_g,
                                             FloorPolicy policy, const CMatrix& fallback);

// vec(S^H Y), column stacking.
CVector reduce_observation(const CMatrix& y, const CMatrix& s);

}  // namespace beamacq
