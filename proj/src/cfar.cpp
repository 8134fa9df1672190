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

#include "beamacq/slow_time_acq.hpp"

#include <cmath>
#include <limits>

namespace beamacq {

double cfar_multiplier(int n_ref, double p_fa_bar) {
  if (n_ref < 1) throw ConfigError("CFAR: no reference cells");
  if (!(p_fa_bar > 0.0 && p_fa_bar < 1.0)) throw ConfigError("CFAR: p_fa_bar must lie in (0, 1)");
  return std::pow(p_fa_bar, -1.0 / n_ref) - 1.0;
}

CfarDecision cfar_temporal(const RVector& row, int l, double p_fa_bar) {
  const int L = static_cast<int>(row.size());
  if (L < 2) throw ConfigError("temporal CFAR needs L >= 2");
  if (l < 0 || l >= L) throw ConfigError("temporal CFAR: delay out of range");
  const double ref = row.sum() - row(l);
  CfarDecision d;
  d.threshold = cfar_multiplier(L - 1, p_fa_bar) * ref;
  d.detected = row(l) > d.threshold;
  return d;
}

int guard_half_width(double guard_deg, double cell_deg) {
  if (!(cell_deg > 0.0)) throw ConfigError("guard: cell width must be > 0");
  return static_cast<int>(std::lround(guard_deg / (2.0 * cell_deg)));
}

CfarDecision cfar_spatial(const RVector& column, int i, double p_fa_bar, int kappa) {
  const int m = static_cast<int>(column.size());
  if (kappa < 0) throw ConfigError("spatial CFAR: negative guard");
  if (2 * kappa + 1 >= m) throw ConfigError("spatial CFAR: guard window of " + std::to_string(2 * kappa + 1) +
                                            " cells does not fit a grid of " + std::to_string(m));
  const int lo = std::max(0, i - kappa);
  const int hi = std::min(m - 1, i + kappa);
  const double ref = column.sum() - column.segment(lo, hi - lo + 1).sum();
  CfarDecision d;
  d.threshold = cfar_multiplier(m - (hi - lo + 1), p_fa_bar) * ref;
  d.detected = column(i) > d.threshold;
  return d;
}

SparsityMap build_sparsity_map(const Jadpp& jadpp, double p_fa_bar, int kappa) {
  SparsityMap out;
  for (const auto& b : jadpp.beta) {
    const int m = static_cast<int>(b.rows());
    const int L = static_cast<int>(b.cols());
    if (L < 2) throw ConfigError("two-stage CFAR needs L >= 2");
    if (2 * kappa + 1 >= m) throw ConfigError("spatial CFAR: guard window exceeds the angular grid");
    if (!b.allFinite()) throw NumericsError("sparsity map: JADPP has non-finite entries");
    const double mult_t = cfar_multiplier(L - 1, p_fa_bar);
    // Multipliers for every possible reference count (truncated edge windows).
    std::vector<double> mult_s(static_cast<std::size_t>(m), 0.0);
    for (int r = m - (2 * kappa + 1); r < m; ++r) mult_s[static_cast<std::size_t>(r)] = cfar_multiplier(r, p_fa_bar);
    Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic> map =
        Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(m, L);
    const RVector row_sum = b.rowwise().sum();
    std::vector<double> prefix(static_cast<std::size_t>(m) + 1);
    for (int l = 0; l < L; ++l) {
      prefix[0] = 0.0;
      for (int i = 0; i < m; ++i) prefix[static_cast<std::size_t>(i) + 1] = prefix[static_cast<std::size_t>(i)] + b(i, l);
      const double total = prefix[static_cast<std::size_t>(m)];
      for (int i = 0; i < m; ++i) {
        const double cut = b(i, l);
        const double g1 = mult_t * (row_sum(i) - cut);
        const int lo = std::max(0, i - kappa);
        const int hi = std::min(m - 1, i + kappa);
        const int n_ref = m - (hi - lo + 1);
        const double window = prefix[static_cast<std::size_t>(hi) + 1] - prefix[static_cast<std::size_t>(lo)];
        const double g2 = mult_s[static_cast<std::size_t>(n_ref)] * (total - window);
        map(i, l) = cut > std::max(g1, g2) ? 1 : 0;
      }
    }
    out.maps.push_back(std::move(map));
  }
  return out;
}

DetectionMetrics detection_metrics(const SparsityMap& map, const std::vector<UserSpec>& users, const AngularGrid& grid,
                                   int L) {
  if (map.maps.size() != users.size()) throw ConfigError("detection_metrics: map/user count mismatch");
  DetectionMetrics out;
  const int m = grid.size();
  for (std::size_t k = 0; k < users.size(); ++k) {
    const auto& I = map.maps[k];
    double hits = 0.0;
    for (const auto& mpc : users[k].mpcs) hits += I(grid.nearest(mpc.mean_aoa_deg), mpc.delay);
    out.pd.push_back(users[k].mpcs.empty() ? std::numeric_limits<double>::quiet_NaN()
                                           : hits / static_cast<double>(users[k].mpcs.size()));
    // False alarms over the cells outside every true support.
    double fa = 0.0, cells = 0.0;
    for (int l = 0; l < L; ++l) {
      const MpcSpec* mpc = users[k].mpc_at(l);
      for (int i = 0; i < m; ++i) {
        if (mpc && mpc->covers(grid.angles_deg[static_cast<std::size_t>(i)])) continue;
        fa += I(i, l);
        cells += 1.0;
      }
    }
    out.pfa.push_back(cells > 0.0 ? fa / cells : 0.0);
  }
  return out;
}

}  // namespace beamacq
