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
#include "beamacq/scenario_io.hpp"
#include "test_support.hpp"

#include <gtest/gtest.h>

#include <fstream>
#include <numbers>

using namespace beamacq;
using namespace beamacq::testing;

namespace {

Scenario toy() {
  Scenario s;
  s.name = "toy";
  s.array.n_antennas = 8;
  s.n_groups = 2;
  s.L = 4;
  s.T = 8;
  s.T_fast = 8;
  s.D = 4;
  s.D_search = 2;
  s.M = 30;
  s.users = {UserSpec{1, 0, 20.0, {MpcSpec{0, 5.0, 3.0, 0.0, 1.0}, MpcSpec{2, 20.0, 2.0, 0.0, 3.0}}},
             UserSpec{2, 1, 10.0, {MpcSpec{1, -20.0, 3.0}}}};
  s.refresh_powers();
  return s;
}

}  // namespace

TEST(Scenario, SteeringVectorDefinition) {
  const ArrayConfig a{5};
  const CVector u = steering_vector(a, 30.0);
  EXPECT_NEAR(u.norm(), 1.0, 1e-14);
  // sin 30 deg = 1/2: phase step pi/2.
  for (int m = 0; m < 5; ++m) EXPECT_NEAR(std::abs(u(m) - std::polar(1.0 / std::sqrt(5.0), m * std::numbers::pi / 2)), 0.0, 1e-14);
}

TEST(Scenario, TrueCcmMatchesClosedForm) {
  // Entry (m, n) of R equals (beta / spread) * (1/N) * integral of exp(j pi (m - n) sin phi),
  // evaluated here with composite Simpson on a fine grid.
  const ArrayConfig a{6};
  const MpcSpec mpc{0, 10.0, 4.0, 2.5};
  const CMatrix r = true_ccm(a, mpc, 2048);
  EXPECT_NEAR(r.trace().real(), 2.5, 1e-12);
  const int steps = 4000;
  for (int m = 0; m < 6; ++m)
    for (int n = 0; n < 6; ++n) {
      cplx acc = 0.0;
      for (int s = 0; s <= steps; ++s) {
        const double phi = (mpc.support_lo() + mpc.spread_deg * s / steps) * std::numbers::pi / 180.0;
        const double w = (s == 0 || s == steps) ? 1.0 : (s % 2 ? 4.0 : 2.0);
        acc += w * std::polar(1.0, std::numbers::pi * (m - n) * std::sin(phi));
      }
      acc *= (1.0 / steps) / 3.0 * mpc.power / 6.0;
      EXPECT_NEAR(std::abs(r(m, n) - acc), 0.0, 1e-6);
    }
}

TEST(Scenario, RayDrawSecondMomentMatchesRayCovariance) {
  // E[h h^H] = (spread / P) (power / spread) sum_p u_p u_p^H; Monte Carlo with
  // 20000 draws should land within a few standard errors.
  const ArrayConfig a{4};
  const MpcSpec mpc{0, -10.0, 3.0, 2.0};
  const int rays = 50;
  CMatrix ref = CMatrix::Zero(4, 4);
  for (int p = 0; p < rays; ++p) {
    const CVector u = steering_vector(a, mpc.mean_aoa_deg + mpc.spread_deg * (static_cast<double>(p) / rays - 0.5));
    ref += (mpc.power / rays) * u * u.adjoint();
  }
  Rng rng(5);
  CMatrix acc = CMatrix::Zero(4, 4);
  const int draws = 20000;
  for (int i = 0; i < draws; ++i) {
    const CVector h = draw_mpc(a, mpc, rays, rng);
    acc += h * h.adjoint();
  }
  acc /= draws;
  EXPECT_LT(rel_err(acc, ref), 0.03);
  // and the ray covariance approximates the continuous one
  EXPECT_LT(rel_err(ref, true_ccm(a, mpc, 1024)), 0.01);
}

TEST(Scenario, RayBasisConsumesRngLikeDrawMpc) {
  const ArrayConfig a{4};
  const MpcSpec mpc{0, 3.0, 2.0, 1.5};
  Rng r1(9), r2(9);
  const CVector h1 = draw_mpc(a, mpc, 30, r1);
  const CVector h2 = RayBasis::make(a, mpc, 30).draw(r2);
  EXPECT_LT((h1 - h2).norm(), 1e-14);
  EXPECT_EQ(r1(), r2());
}

TEST(Scenario, RefreshPowersSplitsByWeight) {
  const Scenario s = toy();
  EXPECT_NEAR(s.users[0].total_power(), 100.0, 1e-9);
  EXPECT_NEAR(s.users[0].mpcs[0].power, 25.0, 1e-9);
  EXPECT_NEAR(s.users[0].mpcs[1].power, 75.0, 1e-9);
  EXPECT_NEAR(s.users[1].total_power(), 10.0, 1e-9);
}

TEST(Scenario, GroupCovariancesSumUp) {
  const Scenario s = toy();
  const GroupCovariances g = group_true_ccms(s);
  CMatrix total = s.noise_power * CMatrix::Identity(8, 8);
  for (const auto& per : g.per_delay)
    for (const auto& r : per) total += r;
  EXPECT_LT(rel_err(total, g.r_y), 1e-14);
  EXPECT_NEAR(g.r_y.trace().real(), 8.0 + 110.0, 1e-9);
  EXPECT_NEAR((g.r_y - g.r_eta[0]).trace().real(), 100.0, 1e-9);
  EXPECT_TRUE(g.per_delay[1][0].isZero());
}

TEST(Scenario, ValidateRejectsBadConfigs) {
  EXPECT_NO_THROW(toy().validate());
  auto expect_bad = [](auto mutate) {
    Scenario s = toy();
    mutate(s);
    EXPECT_THROW(s.validate(), ConfigError);
  };
  expect_bad([](Scenario& s) { s.T = 2; });
  expect_bad([](Scenario& s) { s.D = 8; });
  expect_bad([](Scenario& s) { s.users[0].mpcs[0].delay = 4; });
  expect_bad([](Scenario& s) { s.users[0].mpcs[1].delay = 0; });
  expect_bad([](Scenario& s) { s.users[1].mpcs[0].mean_aoa_deg = -44.5; });
  expect_bad([](Scenario& s) { s.users[1].group = 2; });
  expect_bad([](Scenario& s) { s.p_fa_bar = 1.0; });
  expect_bad([](Scenario& s) { s.rf_floor_policy = "loose"; });
}

TEST(Scenario, SelectUsersKeepsOrder) {
  const Scenario s = select_users(toy(), {1, 0});
  ASSERT_EQ(s.n_users(), 2);
  EXPECT_EQ(s.users[0].id, 2);
  EXPECT_THROW(select_users(toy(), {5}), ConfigError);
}

TEST(ScenarioIo, JsonRoundTrip) {
  const Scenario s = toy();
  const auto j = scenario_to_json(s);
  const Scenario back = scenario_from_json(j);
  EXPECT_EQ(scenario_to_json(back), j);
  EXPECT_EQ(json_hash(j), json_hash(scenario_to_json(back)));
  EXPECT_EQ(back.users[1].group, 1);
  EXPECT_NEAR(back.users[0].mpcs[1].power, 75.0, 1e-9);
}

TEST(ScenarioIo, BundledConfigsLoad) {
  for (const char* name : {"table1", "desk", "exemplary"}) {
    const Scenario s = load_scenario(std::string(BEAMACQ_SOURCE_DIR) + "/configs/" + name + ".json");
    EXPECT_GT(s.n_users(), 0) << name;
  }
  const Scenario t1 = load_scenario(std::string(BEAMACQ_SOURCE_DIR) + "/configs/table1.json");
  EXPECT_EQ(t1.n_users(), 16);
  EXPECT_EQ(t1.n_groups, 4);
  EXPECT_DOUBLE_EQ(t1.cell_deg(), 0.25);
}

TEST(ScenarioIo, ErrorsNameTheProblem) {
  nlohmann::json j = scenario_to_json(toy());
  j.erase("L");
  EXPECT_THROW(scenario_from_json(j), ConfigError);
  j = scenario_to_json(toy());
  j["users"][0]["group"] = 7;
  try {
    scenario_from_json(j);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("group"), std::string::npos);
  }
  EXPECT_THROW(load_scenario("/nonexistent/x.json"), ConfigError);
}
