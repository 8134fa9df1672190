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

// One Monte Carlo trial end to end: slow-time acquisition, covariance
// construction, beam design and fast-time estimation.

#include "beamacq/beam_design.hpp"
#include "beamacq/covariance_builder.hpp"
#include "beamacq/fast_time_est.hpp"
#include "beamacq/scenario.hpp"
#include "beamacq/signals.hpp"
#include "beamacq/slow_time_acq.hpp"

#include <string>
#include <vector>

namespace beamacq {

// Geometry-dependent quantities shared read-only by all trials.
struct PreparedScenario {
  Scenario base;
  SlowTimeFrontEnd front_end;
  CMatrix steering;                             // N x M grid steering table
  CMatrix fallback;                             // N x D beams over the whole sector
  std::vector<std::vector<CMatrix>> unit_ccm;   // [user][mpc] at unit power
  std::vector<std::vector<RayBasis>> unit_rays; // [user][mpc] at unit power
};

PreparedScenario prepare_scenario(const Scenario& s);

// Scenario restricted to the active users of one trial, with their powers.
struct TrialSetup {
  Scenario scenario;
  std::vector<int> source;  // scenario.users[k] == base.users[source[k]] (up to power)

  std::vector<int> user_groups() const;
  std::vector<std::vector<int>> members() const;  // per group, positions in scenario.users
};

// active: indices into base.users (empty = all). group_power_db: per group.
TrialSetup make_setup(const PreparedScenario& prep, const std::vector<int>& active,
                      const std::vector<double>& group_power_db, int t_fast, int J);

// Independent channel draw of every active user, [user][delay].
std::vector<std::vector<CVector>> draw_trial_channels(const PreparedScenario& prep, const TrialSetup& setup, Rng& rng);

// snapshots[p][j] for every sub-sector p and snapshot j.
std::vector<std::vector<CMatrix>> draw_slow_time(const PreparedScenario& prep, const TrialSetup& setup,
                                                 const PilotSet& pilots, Rng& rng);

struct Acquisition {
  JadppMethod method = JadppMethod::amf;
  Jadpp jadpp;
  SparsityMap map;
  DetectionMetrics detection;
  GroupCovariances estimated;
  std::vector<int> d_g;
  std::vector<GroupBeamformer> beams;  // per group (empty S for groups without users)
};

// design = false stops after the sparsity map.
Acquisition acquire(const PreparedScenario& prep, const TrialSetup& setup, const PilotSet& pilots,
                    const std::vector<std::vector<CMatrix>>& snapshots, JadppMethod method, bool design);

// True group covariances of the trial's active users.
GroupCovariances true_group_covariances(const PreparedScenario& prep, const TrialSetup& setup);

// One fast-time training phase of group g: the group's users draw
// h_l ~ CN(0, R_l^(g)) (sum of independent draws of every member's MPC at
// delay l), other groups send i.i.d. data over their physical channels.
struct FastDraw {
  CMatrix y;                                 // N x T_fast
  std::vector<std::vector<CVector>> h;       // [group user][delay]
};
FastDraw draw_fast_time(const PreparedScenario& prep, const TrialSetup& setup, const PilotSet& pilots, int group,
                        Rng& rng);

struct EstimatorOutcome {
  int group = 0;
  EstimatorKind kind = EstimatorKind::rr_mmse;
  bool true_ccm = false;
  NmseParts analytic;
  double emp_err = 0.0;
  double emp_energy = 0.0;
  std::string error;  // non-empty: this estimator failed for this group
};

struct MethodOutcome {
  JadppMethod method = JadppMethod::amf;
  DetectionMetrics detection;
  std::vector<EstimatorOutcome> estimators;
};

struct TrialOptions {
  std::vector<JadppMethod> methods{JadppMethod::amf, JadppMethod::mf};
  std::vector<EstimatorKind> estimators{EstimatorKind::rr_mmse, EstimatorKind::ba_ls, EstimatorKind::ls};
  bool fast_time = true;
  int fast_draws = 4;
};

struct TrialOutcome {
  std::vector<int> source;
  std::vector<int> user_group;
  std::vector<MethodOutcome> methods;
};

TrialOutcome run_trial(const PreparedScenario& prep, const TrialSetup& setup, const TrialOptions& opt, Rng& rng);

// Fast draws for every group with users: draws[g][d].
std::vector<std::vector<FastDraw>> draw_fast_batch(const PreparedScenario& prep, const TrialSetup& setup,
                                                   const PilotSet& pilots, int draws, Rng& rng);

// Builds the requested estimators (estimated- and true-covariance RR-MMSE
// when rr_mmse is requested) for one acquisition and scores them analytically
// and on the supplied draws.
std::vector<EstimatorOutcome> evaluate_estimators(const PreparedScenario& prep, const TrialSetup& setup,
                                                  const PilotSet& pilots, const Acquisition& acq,
                                                  const GroupCovariances& truth,
                                                  const std::vector<EstimatorKind>& kinds,
                                                  const std::vector<std::vector<FastDraw>>& draws);

// Pilots for a trial: slow-time length T, extended to cover T_fast.
PilotSet trial_pilots(const TrialSetup& setup);

}  // namespace beamacq
