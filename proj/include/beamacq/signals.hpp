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

// Kasami pilots, shifted pilot vectors, training matrices and received
// snapshot synthesis.

#include "beamacq/scenario.hpp"

#include <array>
#include <ostream>
#include <vector>

namespace beamacq {

inline constexpr int kKasamiPeriod = 63;
inline constexpr int kKasamiSetSize = 8;

// Small Kasami set of period 63 as 0/1 chips: the degree-6 m-sequence a
// (x^6 + x + 1, register seeded 000001) followed by a xor T^i b, i = 0..6,
// where b is a decimated by 9.
std::vector<std::array<int, kKasamiPeriod>> kasami_small_set();

// m-sequence of x^6 + x + 1 from the all-zero-but-last register state.
std::array<int, kKasamiPeriod> m_sequence63();

// BPSK pilots, symbol x_n defined for n = -(L-1) .. length-1 as
// chip[(n + shift) mod 63] mapped 0 -> +1, 1 -> -1. Precursors are therefore
// the cyclic tail of the code.
struct PilotSet {
  int L = 1;
  int length = 0;
  int shift = 0;
  std::vector<std::array<int, kKasamiPeriod>> chips;  // one code per user slot

  int n_users() const { return static_cast<int>(chips.size()); }
  double symbol(int user, int n) const;
};

// Codes are assigned to users in index order; the seed picks the common
// cyclic start (seed mod 63).
PilotSet kasami_pilots(int n_users, int length, int L, std::uint64_t seed = 0);

// Same codes over a longer window. Chip n >= 63 reads code position
// (n + shift + floor(n / 63)) mod 63: the phase slips one chip per period, since
// a plain repetition caps the rank of any training matrix at 63.
PilotSet extend_pilots(const PilotSet& p, int new_length);

// x_l^(k): entry n = conj(x_{n-l}), n = 0 .. len-1 (len defaults to p.length).
CVector shifted_pilot(const PilotSet& p, int user, int l, int len = -1);

// T_fast x (K_g L) matrix; column (k, l), k-major, holds x^(users[k])_{t-l}.
CMatrix training_matrix(const PilotSet& p, const std::vector<int>& users, int t_fast);

// Transmitted symbols for one user over n = -(L-1) .. T-1, stored at n + L - 1.
std::vector<cplx> pilot_symbols(const PilotSet& p, int user, int T);
// i.i.d. unit-power QPSK over the same window.
std::vector<cplx> data_symbols(int L, int T, Rng& rng);

// y_n = sum_k sum_l h_l^(k) s^(k)_{n-l} + n_n, n = 0..T-1, noise CN(0, N0 I).
// channels[k][l] may be empty for inactive taps.
CMatrix synthesize_snapshot(const std::vector<std::vector<CVector>>& channels,
                            const std::vector<std::vector<cplx>>& symbols, int L, int T,
                            int n_antennas, double noise_power, Rng& rng);

// CSV rows: user,chip,value for n = -(L-1) .. length-1.
void write_pilots_csv(std::ostream& os, const PilotSet& p);

}  // namespace beamacq
