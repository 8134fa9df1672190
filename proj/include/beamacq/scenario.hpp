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

// Experiment description, ULA geometry and the statistical multipath model.

#include "beamacq/numerics.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace beamacq {

using Rng = std::mt19937_64;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Half-wavelength ULA.
struct ArrayConfig {
  int n_antennas = 0;
};

// One multipath component: delay tap, angular support [mean - spread/2, mean + spread/2]
// with uniform angular power density power / spread.
struct MpcSpec {
  int delay = 0;
  double mean_aoa_deg = 0.0;
  double spread_deg = 0.0;
  double power = 0.0;  // beta, linear
  double relative_weight = 1.0;  // share of the user's total power

  double support_lo() const { return mean_aoa_deg - 0.5 * spread_deg; }
  double support_hi() const { return mean_aoa_deg + 0.5 * spread_deg; }
  bool covers(double phi_deg) const { return phi_deg >= support_lo() && phi_deg <= support_hi(); }
};

struct UserSpec {
  int id = 0;
  int group = 0;  // zero-based
  double power_db = 0.0;  // 10 log10(beta^(k) / N0)
  std::vector<MpcSpec> mpcs;

  double total_power() const;
  const MpcSpec* mpc_at(int delay) const;
};

struct Scenario {
  std::string name;
  ArrayConfig array;
  std::vector<UserSpec> users;
  int n_groups = 1;
  int L = 1;
  int T = 1;
  int T_fast = 1;
  int D = 1;
  int D_search = 1;
  int M = 2;
  double sector_min_deg = -45.0;
  double sector_max_deg = 45.0;
  double sub_sector_deg = 0.0;  // 0: one sub-sector spanning the whole sector
  double look_spread_deg = 3.0;
  int J = 1;
  double p_fa_bar = 1e-3;
  double guard_deg = 4.0;
  double overlap_threshold = 0.5;
  double noise_power = 1.0;
  int n_rays = 100;
  int quad_points = 256;
  double pinv_rtol = 1e-12;
  // "adaptive": one chain per MPC cluster when D_g allows it, else none.
  // "strict": D_g below the cluster count is a configuration error.
  std::string rf_floor_policy = "adaptive";
  std::uint64_t seed = 1;

  int n_users() const { return static_cast<int>(users.size()); }
  double cell_deg() const { return (sector_max_deg - sector_min_deg) / M; }

  // Throws ConfigError describing the first violated invariant.
  void validate() const;

  // Sets each MPC power from its user's power_db and relative weights.
  void refresh_powers();
};

// Sets power_db for every user in `group` and refreshes MPC powers.
void set_group_power_db(Scenario& s, int group, double power_db);

// Keeps only the listed users (by position), renumbering nothing.
Scenario select_users(const Scenario& s, const std::vector<int>& keep);

// (1/sqrt(N)) exp(j pi m sin(phi)), m = 0..N-1.
CVector steering_vector(const ArrayConfig& array, double phi_deg);

// Midpoint-rule quadrature of the MPC covariance integral.
CMatrix true_ccm(const ArrayConfig& array, const MpcSpec& mpc, int quad_points);

// Per user, per delay channel vectors (zero where the user has no MPC).
struct ChannelRealization {
  std::vector<std::vector<CVector>> h;  // [user][delay]
};

// Ray model: h = sqrt(spread/P) sum_p alpha_p u(phi_p),
// alpha_p ~ CN(0, power/spread), phi_p = mean + spread (p/P - 1/2).
CVector draw_mpc(const ArrayConfig& array, const MpcSpec& mpc, int n_rays, Rng& rng);

// Precomputed ray steering matrix for repeated draws of one MPC; draw_mpc and
// RayBasis::draw consume the RNG identically.
struct RayBasis {
  CMatrix steering;  // N x P
  double amplitude = 0.0;  // sqrt(spread / P)
  double density = 0.0;    // power / spread

  static RayBasis make(const ArrayConfig& array, const MpcSpec& mpc, int n_rays);
  CVector draw(Rng& rng) const;
};

ChannelRealization draw_channel(const Scenario& s, Rng& rng);

// True covariances grouped as used by the fast-time analysis.
struct GroupCovariances {
  std::vector<std::vector<CMatrix>> per_delay;  // [group][delay], R_l^(g)
  CMatrix r_y;                                   // sum_g sum_l R_l^(g) + N0 I
  std::vector<CMatrix> r_eta;                    // [group], R_y - sum_l R_l^(g)
};

// Per user, per delay true covariances (zero matrices where inactive).
std::vector<std::vector<CMatrix>> user_true_ccms(const Scenario& s);

GroupCovariances group_true_ccms(const Scenario& s);

// Sums per-user covariances into group covariances (shared by the true and
// the estimated paths).
GroupCovariances assemble_group_covariances(const std::vector<std::vector<CMatrix>>& per_user,
                                            const std::vector<int>& user_group, int n_groups,
                                            int n_antennas, double noise_power);

// circular complex Gaussian with E|z|^2 = variance
cplx complex_normal(Rng& rng, double variance);

}  // namespace beamacq
