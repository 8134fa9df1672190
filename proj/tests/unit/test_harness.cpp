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

#include "beamacq/harness.hpp"
#include "beamacq/scenario_io.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace beamacq;

namespace {

Scenario toy() {
  Scenario s;
  s.name = "toy";
  s.array.n_antennas = 12;
  s.n_groups = 2;
  s.L = 4;
  s.T = 12;
  s.T_fast = 12;
  s.D = 4;
  s.D_search = 2;
  s.M = 40;
  s.sector_min_deg = -20;
  s.sector_max_deg = 20;
  s.n_rays = 20;
  s.users = {UserSpec{1, 0, 20.0, {MpcSpec{0, 5.0, 3.0}, MpcSpec{2, 12.0, 3.0}}},
             UserSpec{2, 1, 20.0, {MpcSpec{1, -10.0, 3.0}}}};
  s.refresh_powers();
  return s;
}

SweepSpec toy_sweep(int points, int trials) {
  SweepSpec w;
  for (int i = 0; i < points; ++i) w.values.push_back(10.0 + 10.0 * i);
  w.trials = trials;
  w.fast_draws = 2;
  return w;
}

std::string curves(const SweepResult& r) {
  std::ostringstream os;
  write_curves_csv(os, aggregate(r.records, "snr_db"));
  return os.str();
}

ResultRecord rec(int trial, const std::string& metric, double v, const std::string& entity = "group", int id = 1) {
  return ResultRecord{0, 5.0, trial, 0, "amf", entity, id, "ls", "estimated", metric, v};
}

}  // namespace

TEST(Seeds, SplitMixReferenceValues) {
  // Published splitmix64 outputs for state 0 (first call increments first).
  EXPECT_EQ(splitmix64(0), 0xe220a8397b1dcdafULL);
  EXPECT_NE(trial_seed(1, 0, 1), trial_seed(1, 1, 0));
  EXPECT_EQ(trial_seed(9, 2, 3), trial_seed(9, 2, 3));
}

TEST(Sweep, JsonParsingAndValidation) {
  nlohmann::json j = {{"variable", "t_fast"}, {"values", {16, 32}}, {"trials", 3},
                      {"methods", {"amf"}},   {"estimators", {"ba_ls"}}, {"power_profile", "near_far"}};
  const SweepSpec s = sweep_from_json(j);
  EXPECT_EQ(s.variable, SweepVar::t_fast);
  EXPECT_EQ(s.power_profile, PowerProfile::near_far);
  EXPECT_EQ(sweep_from_json(sweep_to_json(s)).values, s.values);
  j["values"] = nlohmann::json::array();
  EXPECT_THROW(sweep_from_json(j), ConfigError);
  j["values"] = {16.5};
  EXPECT_THROW(sweep_from_json(j), ConfigError);
  j["values"] = {16};
  j["trials"] = 0;
  EXPECT_THROW(sweep_from_json(j), ConfigError);
  j["trials"] = 1;
  j["variable"] = "K";
  EXPECT_THROW(sweep_from_json(j), ConfigError);
}

TEST(Sweep, NearFarPowers) {
  SweepSpec s;
  s.power_profile = PowerProfile::near_far;
  EXPECT_EQ(group_powers_db(s, 4, 10.0), (std::vector<double>{10, 15, 20, 25}));
  s.power_profile = PowerProfile::equal;
  EXPECT_EQ(group_powers_db(s, 2, 10.0), (std::vector<double>{10, 10}));
}

TEST(Aggregate, SingleRecordAndSymmetricPair) {
  auto rows = aggregate({rec(0, "pd", 0.7)}, "snr_db");
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].mean, 0.7);
  EXPECT_DOUBLE_EQ(rows[0].stderr_, 0.0);
  EXPECT_EQ(rows[0].entity, "group1");
  rows = aggregate({rec(0, "pd", 0.2), rec(1, "pd", 0.8)}, "snr_db");
  EXPECT_DOUBLE_EQ(rows[0].mean, 0.5);
  EXPECT_NEAR(rows[0].stderr_, 0.3, 1e-15);  // sd 0.3*sqrt(2) over sqrt(2)
}

TEST(Aggregate, RatioOfMeansWithDeltaMethod) {
  // Hand-computed: num (1, 3), den (2, 2) -> 4/4 = 1; e = (-1, 1), s = sqrt(2),
  // se = s / sqrt(2) / mean(den) = 0.5.
  std::vector<ResultRecord> r{rec(0, "nmse_x_num", 1.0), rec(0, "nmse_x_den", 2.0), rec(1, "nmse_x_num", 3.0),
                              rec(1, "nmse_x_den", 2.0), rec(0, "nmse_x_num", 2.0, "group", 2),
                              rec(0, "nmse_x_den", 4.0, "group", 2)};
  const auto rows = aggregate(r, "snr_db");
  ASSERT_EQ(rows.size(), 3u);
  std::map<std::string, CurveRow> by;
  for (const auto& x : rows) by[x.entity] = x;
  EXPECT_DOUBLE_EQ(by["group1"].mean, 1.0);
  EXPECT_NEAR(by["group1"].stderr_, 0.5, 1e-15);
  EXPECT_DOUBLE_EQ(by["group2"].mean, 0.5);
  EXPECT_DOUBLE_EQ(by["avg"].mean, 0.75);
  EXPECT_NEAR(by["avg"].stderr_, 0.25, 1e-15);
  EXPECT_EQ(by["avg"].metric, "nmse_x");
}

TEST(Aggregate, InvariantToRecordOrder) {
  std::vector<ResultRecord> r;
  for (int t = 0; t < 10; ++t) {
    r.push_back(rec(t, "pd", 0.1 * t));
    r.push_back(rec(t, "nmse_a_num", 0.01 * (t + 1)));
    r.push_back(rec(t, "nmse_a_den", 1.0 + t));
  }
  auto shuffled = r;
  std::reverse(shuffled.begin(), shuffled.end());
  std::ostringstream a, b;
  write_curves_csv(a, aggregate(r, "snr_db"));
  write_curves_csv(b, aggregate(shuffled, "snr_db"));
  EXPECT_EQ(a.str(), b.str());
}

TEST(RunSweep, SmokeRunEmitsRecords) {
  const SweepResult r = run_sweep(toy(), toy_sweep(1, 1), 42, 1);
  EXPECT_TRUE(r.errors.empty());
  ASSERT_FALSE(r.records.empty());
  bool has_pd = false, has_nmse = false;
  for (const auto& x : r.records) {
    has_pd |= x.metric == "pd";
    has_nmse |= x.metric == "nmse_analytic_num";
    EXPECT_EQ(x.trial_seed, trial_seed(42, 0, 0));
  }
  EXPECT_TRUE(has_pd);
  EXPECT_TRUE(has_nmse);
}

TEST(RunSweep, DeterministicAcrossRunsAndThreadCounts) {
  const SweepSpec w = toy_sweep(2, 4);
  const std::string a = curves(run_sweep(toy(), w, 7, 1));
  EXPECT_EQ(a, curves(run_sweep(toy(), w, 7, 1)));
  EXPECT_EQ(a, curves(run_sweep(toy(), w, 7, 3)));
  EXPECT_NE(a, curves(run_sweep(toy(), w, 8, 1)));
}

TEST(RunSweep, TrialErrorsAreRecordedAndSweepContinues) {
  // Strict RF floor with D = 3 leaves one chain for a group with two
  // separated clusters; every trial's beam design fails, the sweep finishes.
  Scenario s = load_scenario(std::string(BEAMACQ_SOURCE_DIR) + "/configs/desk.json");
  s.D = 3;
  s.D_search = 2;
  s.rf_floor_policy = "strict";
  SweepSpec w = toy_sweep(1, 2);
  w.values = {30.0};
  const SweepResult r = run_sweep(s, w, 1, 1);
  ASSERT_EQ(r.errors.size(), 2u);
  EXPECT_NE(r.errors[0].message.find("MPC clusters"), std::string::npos);
  EXPECT_EQ(r.errors[1].trial, 1);
}

TEST(RunSweep, ActiveUserSelectionPerGroup) {
  Scenario s = toy();
  s.users.push_back(UserSpec{3, 0, 20.0, {MpcSpec{1, 3.0, 2.0}}});
  s.refresh_powers();
  const PreparedScenario prep = prepare_scenario(s);
  SweepSpec w = toy_sweep(1, 1);
  w.active_per_group = 1;
  Rng rng(3);
  const TrialSetup t = setup_for_point(prep, w, 20.0, rng);
  ASSERT_EQ(t.scenario.n_users(), 2);
  EXPECT_EQ(t.scenario.users[0].group, 0);
  EXPECT_EQ(t.scenario.users[1].id, 2);
  w.active_per_group = 2;
  EXPECT_THROW(setup_for_point(prep, w, 20.0, rng), ConfigError);
}

TEST(Persist, WritesThreeArtifacts) {
  const auto dir = std::filesystem::temp_directory_path() / "beamacq_persist_test";
  std::filesystem::remove_all(dir);
  const Scenario s = toy();
  run_and_persist(s, scenario_to_json(s), toy_sweep(1, 2), 5, dir, 2);
  for (const char* f : {"curves.csv", "records.csv", "manifest.json"}) EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
  std::ifstream m(dir / "manifest.json");
  const auto j = nlohmann::json::parse(m);
  EXPECT_EQ(j["master_seed"], 5);
  EXPECT_EQ(j["scenario_hash"], json_hash(scenario_to_json(s)));
  std::ifstream c(dir / "curves.csv");
  std::string header;
  std::getline(c, header);
  EXPECT_EQ(header, "sweep_var,sweep_value,method,metric,entity,estimator,provenance,mean,stderr,n");
  std::filesystem::remove_all(dir);
}
