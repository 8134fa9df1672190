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

#include "beamacq/scenario.hpp"

#include "beamacq/kernels.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace beamacq {

double UserSpec::total_power() const {
  double s = 0.0;
  for (const auto& m : mpcs) s += m.power;
  return s;
}

const MpcSpec* UserSpec::mpc_at(int delay) const {
  for (const auto& m : mpcs)
    if (m.delay == delay) return &m;
  return nullptr;
}

void Scenario::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("scenario: " + msg); };
  if (array.n_antennas < 2) fail("n_antennas must be >= 2");
  if (users.empty()) fail("at least one user is required");
  if (n_groups < 1) fail("groups must be >= 1");
  if (L < 1) fail("L must be >= 1");
  if (T < L) fail("slow-time length T must be >= L");
  if (T_fast < 1) fail("T_fast must be >= 1");
  if (D < 1 || D >= array.n_antennas) fail("D must satisfy 1 <= D < N");
  if (D_search < 1 || D_search > D) fail("D_search must satisfy 1 <= D_search <= D");
  if (T <= D_search) fail("T must exceed D_search so the AMF sample covariance is invertible");
  if (M < 2) fail("M must be >= 2");
  if (!(sector_max_deg > sector_min_deg)) fail("sector must have positive width");
  if (sector_min_deg < -90.0 || sector_max_deg > 90.0) fail("sector must lie inside [-90, 90] degrees");
  if (sub_sector_deg < 0.0) fail("sub_sector_deg must be >= 0");
  if (!(look_spread_deg >= 0.0)) fail("look_spread_deg must be >= 0");
  if (J < 1) fail("J must be >= 1");
  if (!(p_fa_bar > 0.0 && p_fa_bar < 1.0)) fail("p_fa_bar must lie in (0, 1)");
  if (guard_deg < 0.0) fail("guard_deg must be >= 0");
  if (!(overlap_threshold > 0.0 && overlap_threshold <= 1.0)) fail("overlap_threshold must lie in (0, 1]");
  if (!(noise_power > 0.0)) fail("noise_power must be > 0");
  if (n_rays < 1) fail("n_rays must be >= 1");
  if (quad_points < 8) fail("quad_points must be >= 8");
  if (rf_floor_policy != "adaptive" && rf_floor_policy != "strict")
    fail("rf_floor_policy must be \"adaptive\" or \"strict\"");
  std::set<int> ids;
  for (const auto& u : users) {
    if (!ids.insert(u.id).second) fail("duplicate user id " + std::to_string(u.id));
    if (u.group < 0 || u.group >= n_groups) fail("user " + std::to_string(u.id) + " has group outside [1, groups]");
    std::set<int> delays;
    for (const auto& m : u.mpcs) {
      const std::string tag = "user " + std::to_string(u.id) + " delay " + std::to_string(m.delay);
      if (m.delay < 0 || m.delay >= L) fail(tag + ": delay outside [0, L)");
      if (!delays.insert(m.delay).second) fail(tag + ": more than one MPC at this delay");
      if (!(m.spread_deg > 0.0)) fail(tag + ": angular spread must be > 0");
      if (!(m.power > 0.0)) fail(tag + ": power must be > 0");
      if (m.support_lo() < sector_min_deg || m.support_hi() > sector_max_deg)
        fail(tag + ": angular support leaves the sector");
    }
  }
}

void Scenario::refresh_powers() {
  for (auto& u : users) {
    double wsum = 0.0;
    for (const auto& m : u.mpcs) wsum += m.relative_weight;
    const double beta = noise_power * std::pow(10.0, u.power_db / 10.0);
    for (auto& m : u.mpcs) m.power = wsum > 0.0 ? beta * m.relative_weight / wsum : 0.0;
  }
}

void set_group_power_db(Scenario& s, int group, double power_db) {
  for (auto& u : s.users)
    if (u.group == group) u.power_db = power_db;
  s.refresh_powers();
}

Scenario select_users(const Scenario& s, const std::vector<int>& keep) {
  Scenario out = s;
  out.users.clear();
  for (int idx : keep) {
    if (idx < 0 || idx >= s.n_users()) throw ConfigError("select_users: index out of range");
    out.users.push_back(s.users[static_cast<std::size_t>(idx)]);
  }
  return out;
}

CVector steering_vector(const ArrayConfig& array, double phi_deg) {
  const int n = array.n_antennas;
  const double step = std::numbers::pi * std::sin(phi_deg * std::numbers::pi / 180.0);
  const double scale = 1.0 / std::sqrt(static_cast<double>(n));
  CVector u(n);
  for (int m = 0; m < n; ++m) u(m) = std::polar(scale, step * m);
  return u;
}

CMatrix true_ccm(const ArrayConfig& array, const MpcSpec& mpc, int quad_points) {
  if (quad_points < 8) throw ConfigError("true_ccm: quad_points must be >= 8");
  const int n = array.n_antennas;
  CMatrix r = CMatrix::Zero(n, n);
  const double w = mpc.power / quad_points;
  for (int q = 0; q < quad_points; ++q) {
    const double phi = mpc.support_lo() + mpc.spread_deg * (q + 0.5) / quad_points;
    const CVector u = steering_vector(array, phi);
    kernels::her_update({r.data(), static_cast<std::size_t>(r.size())}, {u.data(), static_cast<std::size_t>(n)}, w);
  }
  return r;
}

cplx complex_normal(Rng& rng, double variance) {
  std::normal_distribution<double> g(0.0, std::sqrt(0.5 * variance));
  const double re = g(rng);
  const double im = g(rng);
  return {re, im};
}

RayBasis RayBasis::make(const ArrayConfig& array, const MpcSpec& mpc, int n_rays) {
  RayBasis b;
  b.steering = CMatrix::Zero(array.n_antennas, n_rays);
  if (!(mpc.power > 0.0) || !(mpc.spread_deg > 0.0)) return b;
  b.density = mpc.power / mpc.spread_deg;
  b.amplitude = std::sqrt(mpc.spread_deg / n_rays);
  for (int p = 0; p < n_rays; ++p) {
    const double phi = mpc.mean_aoa_deg + mpc.spread_deg * (static_cast<double>(p) / n_rays - 0.5);
    b.steering.col(p) = steering_vector(array, phi);
  }
  return b;
}

CVector RayBasis::draw(Rng& rng) const {
  CVector alpha(steering.cols());
  if (density == 0.0) return CVector::Zero(steering.rows());
  for (Index p = 0; p < alpha.size(); ++p) alpha(p) = amplitude * complex_normal(rng, density);
  return steering * alpha;
}

CVector draw_mpc(const ArrayConfig& array, const MpcSpec& mpc, int n_rays, Rng& rng) {
  return RayBasis::make(array, mpc, n_rays).draw(rng);
}

ChannelRealization draw_channel(const Scenario& s, Rng& rng) {
  ChannelRealization out;
  out.h.resize(s.users.size());
  for (std::size_t k = 0; k < s.users.size(); ++k) {
    out.h[k].assign(static_cast<std::size_t>(s.L), CVector::Zero(s.array.n_antennas));
    for (const auto& m : s.users[k].mpcs) out.h[k][static_cast<std::size_t>(m.delay)] = draw_mpc(s.array, m, s.n_rays, rng);
  }
  return out;
}

std::vector<std::vector<CMatrix>> user_true_ccms(const Scenario& s) {
  const int n = s.array.n_antennas;
  std::vector<std::vector<CMatrix>> out(s.users.size());
  for (std::size_t k = 0; k < s.users.size(); ++k) {
    out[k].assign(static_cast<std::size_t>(s.L), CMatrix::Zero(n, n));
    for (const auto& m : s.users[k].mpcs) out[k][static_cast<std::size_t>(m.delay)] = true_ccm(s.array, m, s.quad_points);
  }
  return out;
}

GroupCovariances assemble_group_covariances(const std::vector<std::vector<CMatrix>>& per_user,
                                            const std::vector<int>& user_group, int n_groups,
                                            int n_antennas, double noise_power) {
  if (per_user.size() != user_group.size()) throw ConfigError("assemble_group_covariances: grouping size mismatch");
  const std::size_t L = per_user.empty() ? 0 : per_user.front().size();
  GroupCovariances g;
  g.per_delay.assign(static_cast<std::size_t>(n_groups),
                     std::vector<CMatrix>(L, CMatrix::Zero(n_antennas, n_antennas)));
  for (std::size_t k = 0; k < per_user.size(); ++k) {
    const int grp = user_group[k];
    if (grp < 0 || grp >= n_groups) throw ConfigError("assemble_group_covariances: group index out of range");
    for (std::size_t l = 0; l < L; ++l) g.per_delay[static_cast<std::size_t>(grp)][l] += per_user[k][l];
  }
  g.r_y = noise_power * CMatrix::Identity(n_antennas, n_antennas);
  std::vector<CMatrix> group_sum(static_cast<std::size_t>(n_groups), CMatrix::Zero(n_antennas, n_antennas));
  for (int grp = 0; grp < n_groups; ++grp)
    for (const auto& r : g.per_delay[static_cast<std::size_t>(grp)]) group_sum[static_cast<std::size_t>(grp)] += r;
  for (const auto& r : group_sum) g.r_y += r;
  g.r_eta.reserve(static_cast<std::size_t>(n_groups));
  for (const auto& r : group_sum) g.r_eta.push_back(g.r_y - r);
  return g;
}

GroupCovariances group_true_ccms(const Scenario& s) {
  std::vector<int> grouping;
  for (const auto& u : s.users) grouping.push_back(u.group);
  return assemble_group_covariances(user_true_ccms(s), grouping, s.n_groups, s.array.n_antennas, s.noise_power);
}

}  // namespace beamacq
