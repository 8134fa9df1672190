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

#include "beamacq/beam_design.hpp"

#include <algorithm>
#include <numeric>

namespace beamacq {

std::vector<std::vector<int>> group_support(const SparsityMap& map, const std::vector<int>& members, int L) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(L));
  for (int l = 0; l < L; ++l) {
    auto& s = out[static_cast<std::size_t>(l)];
    if (members.empty()) continue;
    const Index m = map.maps[static_cast<std::size_t>(members.front())].rows();
    for (Index i = 0; i < m; ++i)
      for (int k : members)
        if (map.maps[static_cast<std::size_t>(k)](i, l)) {
          s.push_back(static_cast<int>(i));
          break;
        }
  }
  return out;
}

double overlap_ratio(const std::vector<int>& a, const std::vector<int>& b) {
  if (a.empty() || b.empty()) return 0.0;
  std::vector<int> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return static_cast<double>(common.size()) / static_cast<double>(std::min(a.size(), b.size()));
}

std::vector<std::vector<int>> cluster_mpcs(const std::vector<std::vector<int>>& support, double zeta) {
  if (!(zeta > 0.0 && zeta <= 1.0)) throw ConfigError("cluster_mpcs: overlap threshold must lie in (0, 1]");
  const int L = static_cast<int>(support.size());
  std::vector<int> parent(static_cast<std::size_t>(L));
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  for (int a = 0; a < L; ++a)
    for (int b = a + 1; b < L; ++b)
      if (overlap_ratio(support[static_cast<std::size_t>(a)], support[static_cast<std::size_t>(b)]) >= zeta) {
        const int ra = find(a), rb = find(b);
        if (ra != rb) parent[static_cast<std::size_t>(std::max(ra, rb))] = std::min(ra, rb);
      }
  std::vector<std::vector<int>> clusters;
  std::vector<int> slot(static_cast<std::size_t>(L), -1);
  for (int l = 0; l < L; ++l) {
    if (support[static_cast<std::size_t>(l)].empty()) continue;
    const int r = find(l);
    if (slot[static_cast<std::size_t>(r)] < 0) {
      slot[static_cast<std::size_t>(r)] = static_cast<int>(clusters.size());
      clusters.emplace_back();
    }
    clusters[static_cast<std::size_t>(slot[static_cast<std::size_t>(r)])].push_back(l);
  }
  return clusters;
}

std::vector<int> allocate_group_chains(int D, const std::vector<int>& users_per_group) {
  const int total = std::accumulate(users_per_group.begin(), users_per_group.end(), 0);
  std::vector<int> out(users_per_group.size(), 0);
  if (total <= 0) return out;
  std::vector<double> rem(users_per_group.size());
  int used = 0;
  for (std::size_t g = 0; g < users_per_group.size(); ++g) {
    const double share = static_cast<double>(D) * users_per_group[g] / total;
    out[g] = static_cast<int>(std::floor(share));
    rem[g] = share - out[g];
    used += out[g];
  }
  std::vector<std::size_t> order(users_per_group.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b] + 1e-12; });
  for (std::size_t i = 0; used < D && i < order.size(); ++i, ++used) ++out[order[i]];
  return out;
}

FloorPolicy parse_floor_policy(const std::string& name) {
  if (name == "adaptive") return FloorPolicy::adaptive;
  if (name == "strict") return FloorPolicy::strict;
  throw ConfigError("unknown rf_floor_policy \"" + name + "\"");
}

double allocation_cost(const std::vector<RVector>& lambdas, const std::vector<int>& d) {
  double c = 0.0;
  for (std::size_t l = 0; l < d.size(); ++l)
    for (int n = 0; n < d[l]; ++n) c += 1.0 / (lambdas[l](n) + 1.0);
  return c;
}

std::vector<int> allocate_rf_chains(const std::vector<RVector>& lambdas, int d_g, FloorPolicy policy) {
  const int c = static_cast<int>(lambdas.size());
  if (d_g < 0) throw ConfigError("allocate_rf_chains: negative chain count");
  std::vector<int> d(static_cast<std::size_t>(c), 0);
  if (c == 0 || d_g == 0) {
    if (c > 0 && policy == FloorPolicy::strict)
      throw ConfigError("allocate_rf_chains: no RF chains for " + std::to_string(c) + " MPC clusters");
    return d;
  }
  int floor = 1;
  if (d_g < c) {
    if (policy == FloorPolicy::strict)
      throw ConfigError("allocate_rf_chains: D_g = " + std::to_string(d_g) + " is below the " + std::to_string(c) +
                        " MPC clusters; raise D, lower the overlap threshold or use rf_floor_policy \"adaptive\"");
    floor = 0;
  }
  int left = d_g;
  for (auto& v : d) {
    v = floor;
    left -= floor;
  }
  for (; left > 0; --left) {
    int best = -1;
    double best_val = -1.0;
    for (int l = 0; l < c; ++l) {
      const auto& lam = lambdas[static_cast<std::size_t>(l)];
      const int next = d[static_cast<std::size_t>(l)];
      if (next >= lam.size()) continue;
      if (lam(next) > best_val) {
        best_val = lam(next);
        best = l;
      }
    }
    if (best < 0) throw ConfigError("allocate_rf_chains: more chains than available eigenvalues");
    ++d[static_cast<std::size_t>(best)];
  }
  return d;
}

GroupBeamformer build_statistical_beamformer(const std::vector<std::vector<int>>& clusters,
                                             const std::vector<CMatrix>& per_delay, const CMatrix& r_y, int d_g,
                                             FloorPolicy policy, const CMatrix& fallback) {
  GroupBeamformer out;
  out.clusters = clusters;
  const Index n = r_y.rows();
  if (d_g < 0 || d_g > n) throw ConfigError("build_statistical_beamformer: D_g outside [0, N]");
  if (d_g == 0) {
    out.s = CMatrix::Zero(n, 0);
    out.d.assign(clusters.size(), 0);
    out.offset.assign(clusters.size(), 0);
    return out;
  }
  if (clusters.empty()) {
    if (fallback.cols() < d_g) throw ConfigError("build_statistical_beamformer: fallback beams too narrow");
    out.s = fallback.leftCols(d_g);
    out.fallback = true;
    return out;
  }
  std::vector<CMatrix> r_cluster;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    CMatrix r = CMatrix::Zero(n, n);
    for (int l : clusters[c]) r += per_delay[static_cast<std::size_t>(l)];
    GeneralizedEigOptions opt;
    opt.a_role = "R_cluster" + std::to_string(c);
    opt.b_role = "R_y - R_cluster" + std::to_string(c);
    out.lambdas.push_back(generalized_eig(r, r_y - r, std::min<Index>(d_g, n), opt).values);
    r_cluster.push_back(std::move(r));
  }
  out.d = allocate_rf_chains(out.lambdas, d_g, policy);
  CMatrix raw(n, d_g);
  int col = 0;
  std::vector<CMatrix> blocks;
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    out.offset.push_back(col);
    const int dc = out.d[c];
    if (dc == 0) {
      blocks.emplace_back(n, 0);
      continue;
    }
    GeneralizedEigOptions opt;
    opt.a_role = "R_cluster" + std::to_string(c);
    opt.b_role = "R_y";
    CMatrix v = generalized_eig(r_cluster[c], r_y, dc, opt).vectors;
    for (Index j = 0; j < v.cols(); ++j) v.col(j).normalize();
    raw.middleCols(col, dc) = v;
    blocks.push_back(std::move(v));
    col += dc;
  }
  for (std::size_t a = 0; a < clusters.size(); ++a) {
    if (blocks[a].cols() == 0) continue;
    const double own = (blocks[a].adjoint() * r_cluster[a] * blocks[a]).norm();
    for (std::size_t b = 0; b < clusters.size(); ++b) {
      if (a == b || own <= 0.0) continue;
      out.leakage = std::max(out.leakage, (blocks[a].adjoint() * r_cluster[b] * blocks[a]).norm() / own);
    }
  }
  out.s = orthonormalize_columns(raw);
  return out;
}

CVector reduce_observation(const CMatrix& y, const CMatrix& s) {
  if (y.rows() != s.rows()) throw ConfigError("reduce_observation: dimension mismatch");
  const CMatrix r = s.adjoint() * y;
  return Eigen::Map<const CVector>(r.data(), r.size());
}

}  // namespace beamacq
