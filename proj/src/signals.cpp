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

#include "beamacq/signals.hpp"

#include <stdexcept>

namespace beamacq {

std::array<int, kKasamiPeriod> m_sequence63() {
  // a[n+6] = a[n+1] xor a[n]
  std::array<int, kKasamiPeriod> a{};
  std::array<int, kKasamiPeriod + 6> r{};
  r[5] = 1;
  for (int n = 0; n < kKasamiPeriod; ++n) r[n + 6] = r[n + 1] ^ r[n];
  for (int n = 0; n < kKasamiPeriod; ++n) a[n] = r[n];
  return a;
}

std::vector<std::array<int, kKasamiPeriod>> kasami_small_set() {
  const auto a = m_sequence63();
  // Decimation by 9 from some phases of a is identically zero; take the first
  // phase that yields the period-7 m-sequence.
  std::array<int, kKasamiPeriod> b{};
  for (int phase = 0; phase < 9; ++phase) {
    int ones = 0;
    for (int n = 0; n < kKasamiPeriod; ++n) ones += b[n] = a[(9 * n + phase) % kKasamiPeriod];
    if (ones > 0) break;
  }
  std::vector<std::array<int, kKasamiPeriod>> set;
  set.push_back(a);
  for (int i = 0; i < 7; ++i) {
    std::array<int, kKasamiPeriod> c{};
    for (int n = 0; n < kKasamiPeriod; ++n) c[n] = a[n] ^ b[(n + i) % kKasamiPeriod];
    set.push_back(c);
  }
  return set;
}

double PilotSet::symbol(int user, int n) const {
  if (user < 0 || user >= n_users()) throw std::out_of_range("pilot user index out of range");
  if (n < -(L - 1) || n >= length) throw std::out_of_range("pilot symbol index outside [-(L-1), length)");
  int idx = (n + shift + (n >= kKasamiPeriod ? n / kKasamiPeriod : 0)) % kKasamiPeriod;
  if (idx < 0) idx += kKasamiPeriod;
  return chips[static_cast<std::size_t>(user)][static_cast<std::size_t>(idx)] ? -1.0 : 1.0;
}

PilotSet kasami_pilots(int n_users, int length, int L, std::uint64_t seed) {
  if (length < 1 || length > kKasamiPeriod) throw ConfigError("kasami_pilots: length must lie in [1, 63]");
  if (L < 1) throw ConfigError("kasami_pilots: L must be >= 1");
  if (n_users < 0 || n_users > kKasamiSetSize)
    throw ConfigError("kasami_pilots: " + std::to_string(n_users) + " users exceed the 8 available Kasami codes");
  const auto set = kasami_small_set();
  PilotSet p;
  p.L = L;
  p.length = length;
  p.shift = static_cast<int>(seed % kKasamiPeriod);
  p.chips.assign(set.begin(), set.begin() + n_users);
  return p;
}

PilotSet extend_pilots(const PilotSet& p, int new_length) {
  if (new_length < p.length) throw ConfigError("extend_pilots: new length shorter than the current one");
  PilotSet out = p;
  out.length = new_length;
  return out;
}

CVector shifted_pilot(const PilotSet& p, int user, int l, int len) {
  if (len < 0) len = p.length;
  if (l < 0 || l >= p.L) throw std::out_of_range("shifted_pilot: delay outside [0, L)");
  CVector x(len);
  for (int n = 0; n < len; ++n) x(n) = std::conj(cplx(p.symbol(user, n - l), 0.0));
  return x;
}

CMatrix training_matrix(const PilotSet& p, const std::vector<int>& users, int t_fast) {
  if (t_fast > p.length) throw ConfigError("training_matrix: T_fast exceeds the pilot length");
  const int L = p.L;
  CMatrix x(t_fast, static_cast<Index>(users.size()) * L);
  for (std::size_t k = 0; k < users.size(); ++k)
    for (int l = 0; l < L; ++l)
      for (int t = 0; t < t_fast; ++t) x(t, static_cast<Index>(k) * L + l) = p.symbol(users[k], t - l);
  return x;
}

std::vector<cplx> pilot_symbols(const PilotSet& p, int user, int T) {
  std::vector<cplx> s(static_cast<std::size_t>(T + p.L - 1));
  for (int n = -(p.L - 1); n < T; ++n) s[static_cast<std::size_t>(n + p.L - 1)] = p.symbol(user, n);
  return s;
}

std::vector<cplx> data_symbols(int L, int T, Rng& rng) {
  std::vector<cplx> s(static_cast<std::size_t>(T + L - 1));
  const double a = 1.0 / std::sqrt(2.0);
  for (auto& v : s) {
    const auto bits = rng();
    v = {(bits & 1U) ? -a : a, (bits & 2U) ? -a : a};
  }
  return s;
}

CMatrix synthesize_snapshot(const std::vector<std::vector<CVector>>& channels,
                            const std::vector<std::vector<cplx>>& symbols, int L, int T,
                            int n_antennas, double noise_power, Rng& rng) {
  if (channels.size() != symbols.size()) throw ConfigError("synthesize_snapshot: channel/symbol user count mismatch");
  CMatrix y = CMatrix::Zero(n_antennas, T);
  CMatrix h(n_antennas, L);
  CMatrix conv(L, T);
  for (std::size_t k = 0; k < channels.size(); ++k) {
    const auto& s = symbols[k];
    if (static_cast<int>(s.size()) != T + L - 1) throw ConfigError("synthesize_snapshot: symbol stream length mismatch");
    bool any = false;
    for (int l = 0; l < L; ++l) {
      const bool live = static_cast<std::size_t>(l) < channels[k].size() && channels[k][l].size() == n_antennas;
      if (live) {
        h.col(l) = channels[k][l];
        any = true;
      } else {
        h.col(l).setZero();
      }
    }
    if (!any) continue;
    for (int l = 0; l < L; ++l)
      for (int n = 0; n < T; ++n) conv(l, n) = s[static_cast<std::size_t>(n - l + L - 1)];
    y.noalias() += h * conv;
  }
  if (noise_power > 0.0)
    for (Index c = 0; c < y.cols(); ++c)
      for (Index r = 0; r < y.rows(); ++r) y(r, c) += complex_normal(rng, noise_power);
  return y;
}

void write_pilots_csv(std::ostream& os, const PilotSet& p) {
  os << "user,chip,value\n";
  for (int k = 0; k < p.n_users(); ++k)
    for (int n = -(p.L - 1); n < p.length; ++n) os << k + 1 << ',' << n << ',' << p.symbol(k, n) << '\n';
}

}  // namespace beamacq
