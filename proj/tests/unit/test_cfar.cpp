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
#include "test_support.hpp"

#include <gtest/gtest.h>

using namespace beamacq;

TEST(Cfar, MultiplierCalibratesExponentialCells) {
  // For i.i.d. unit exponentials, P(X0 > a * sum_{1..n} X) = (1 + a)^-n.
  for (int n : {1, 5, 31, 359})
    for (double p : {1e-1, 1e-3, 1e-6}) EXPECT_NEAR(std::pow(1.0 + cfar_multiplier(n, p), -n), p, 1e-12 * p / 1e-6);
  EXPECT_THROW(cfar_multiplier(0, 0.1), ConfigError);
  EXPECT_THROW(cfar_multiplier(3, 1.0), ConfigError);
}

TEST(Cfar, MonteCarloFalseAlarmRate) {
  Rng rng(7);
  std::exponential_distribution<double> e(1.0);
  const double p = 0.02;
  int hits_t = 0, hits_s = 0;
  const int rows = 20000;
  RVector row(8), col(40);
  for (int r = 0; r < rows; ++r) {
    for (Index i = 0; i < row.size(); ++i) row(i) = e(rng);
    hits_t += cfar_temporal(row, r % 8, p).detected;
    for (Index i = 0; i < col.size(); ++i) col(i) = e(rng);
    hits_s += cfar_spatial(col, r % 40, p, 3).detected;
  }
  // 20000 Bernoulli(0.02) trials: sd ~ 0.001.
  EXPECT_NEAR(static_cast<double>(hits_t) / rows, p, 0.005);
  EXPECT_NEAR(static_cast<double>(hits_s) / rows, p, 0.005);
}

TEST(Cfar, SpatialWindowTruncatesAtEdges) {
  RVector col = RVector::Ones(20);
  // Interior: 20 - 7 reference cells; edge i = 0: 20 - 4.
  EXPECT_NEAR(cfar_spatial(col, 10, 0.01, 3).threshold, cfar_multiplier(13, 0.01) * 13.0, 1e-12);
  EXPECT_NEAR(cfar_spatial(col, 0, 0.01, 3).threshold, cfar_multiplier(16, 0.01) * 16.0, 1e-12);
  EXPECT_THROW(cfar_spatial(col, 0, 0.01, 10), ConfigError);
  EXPECT_EQ(guard_half_width(4.0, 0.25), 8);
  EXPECT_EQ(guard_half_width(4.0, 1.5), 1);
}

TEST(Cfar, SparsityMapMatchesPerCellTests) {
  Rng rng(8);
  std::exponential_distribution<double> e(1.0);
  Jadpp j;
  RMatrix b(30, 6);
  for (Index c = 0; c < b.cols(); ++c)
    for (Index r = 0; r < b.rows(); ++r) b(r, c) = e(rng);
  b(4, 2) = 80.0;
  b(0, 5) = 60.0;
  b(29, 0) = 70.0;
  j.beta = {b};
  const double p = 0.05;
  const int kappa = 2;
  const SparsityMap map = build_sparsity_map(j, p, kappa);
  int ones = 0;
  for (Index r = 0; r < b.rows(); ++r)
    for (Index c = 0; c < b.cols(); ++c) {
      const auto t = cfar_temporal(b.row(r).transpose(), static_cast<int>(c), p);
      const auto s = cfar_spatial(b.col(c), static_cast<int>(r), p, kappa);
      EXPECT_EQ(map.maps[0](r, c), (t.detected && s.detected) ? 1 : 0) << r << "," << c;
      ones += map.maps[0](r, c);
    }
  EXPECT_EQ(map.maps[0](4, 2), 1);
  EXPECT_EQ(map.maps[0](0, 5), 1);
  EXPECT_EQ(map.maps[0](29, 0), 1);
  EXPECT_TRUE(map.user_active(0));
  EXPECT_GE(ones, 3);
}

TEST(Cfar, DetectionMetricsCountsCells) {
  AngularGrid g;
  g.min_deg = 0.0;
  g.cell_deg = 1.0;
  for (int i = 0; i < 10; ++i) g.angles_deg.push_back(i);
  UserSpec u{1, 0, 0.0, {MpcSpec{1, 4.0, 2.0, 1.0}}};  // covers 3, 4, 5 at delay 1
  SparsityMap m;
  m.maps.emplace_back(Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic>::Zero(10, 2));
  m.maps[0](4, 1) = 1;
  m.maps[0](3, 1) = 1;  // inside the support: neither hit nor false alarm
  m.maps[0](9, 0) = 1;  // false alarm
  const auto d = detection_metrics(m, {u}, g, 2);
  EXPECT_DOUBLE_EQ(d.pd[0], 1.0);
  EXPECT_DOUBLE_EQ(d.pfa[0], 1.0 / 17.0);
}
