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

#include "beamacq/pipeline.hpp"

#include <algorithm>
#include <cmath>

namespace beamacq {

namespace {

MpcSpec unit_power(MpcSpec m) {
  m.power = 1.0;
  return m;
}

}  // namespace

PreparedScenario prepare_scenario(const Scenario& s) {
  s.validate();
  PreparedScenario p;
  p.base = s;
  p.front_end = build_front_end(s);
  p.steering = steering_table(s.array, p.front_end.grid);
  p.fallback = sector_beamformer(s.array, s.sector_min_deg, s.sector_max_deg, s.D);
  for (const auto& u : s.users) {
    std::vector<CMatrix> ccm;
    std::vector<RayBasis> rays;
    for (const auto& m : u.mpcs) {
      ccm.push_back(true_ccm(s.array, unit_power(m), s.quad_points));
      rays.push_back(RayBasis::make(s.array, unit_power(m), s.n_rays));
    }
    p.unit_ccm.push_back(std::move(ccm));
    p.unit_rays.push_back(std::move(rays));
  }
  return p;
}

std::vector<int> TrialSetup::user_groups() const {
  std::vector<int> g;
  for (const auto& u : scenario.users) g.push_back(u.group);
  return g;
}

std::vector<std::vector<int>> TrialSetup::members() const {
  std::vector<std::vector<int>> m(static_cast<std::size_t>(scenario.n_groups));
  for (int k = 0; k < scenario.n_users(); ++k) m[static_cast<std::size_t>(scenario.users[static_cast<std::size_t>(k)].group)].push_back(k);
  return m;
}

TrialSetup make_setup(const PreparedScenario& prep, const std::vector<int>& active,
                      const std::vector<double>& group_power_db, int t_fast, int J) {
  TrialSetup t;
  if (active.empty()) {
    t.source.resize(prep.base.users.size());
    for (std::size_t k = 0; k < t.source.size(); ++k) t.source[k] = static_cast<int>(k);
  } else {
    t.source = active;
  }
  t.scenario = select_users(prep.base, t.source);
  if (t.scenario.n_users() > kKasamiSetSize)
    throw ConfigError("trial has " + std::to_string(t.scenario.n_users()) +
                      " active users; the Kasami set provides 8 codes (set active_per_group)");
  if (!group_power_db.empty()) {
    if (static_cast<int>(group_power_db.size()) != t.scenario.n_groups)
      throw ConfigError("make_setup: need one power per group");
    for (auto& u : t.scenario.users) u.power_db = group_power_db[static_cast<std::size_t>(u.group)];
  }
  t.scenario.T_fast = t_fast > 0 ? t_fast : t.scenario.T_fast;
  t.scenario.J = J > 0 ? J : t.scenario.J;
  t.scenario.refresh_powers();
  t.scenario.validate();
  return t;
}

PilotSet trial_pilots(const TrialSetup& setup) {
  const auto& s = setup.scenario;
  PilotSet p = kasami_pilots(s.n_users(), s.T, s.L);
  return extend_pilots(p, std::max(s.T, s.T_fast));
}

namespace {

CVector draw_user_mpc(const PreparedScenario& prep, const TrialSetup& setup, int k, std::size_t m, Rng& rng) {
  const auto& mpc = setup.scenario.users[static_cast<std::size_t>(k)].mpcs[m];
  const auto& basis = prep.unit_rays[static_cast<std::size_t>(setup.source[static_cast<std::size_t>(k)])][m];
  return std::sqrt(mpc.power) * basis.draw(rng);
}

}  // namespace

std::vector<std::vector<CVector>> draw_trial_channels(const PreparedScenario& prep, const TrialSetup& setup, Rng& rng) {
  const auto& s = setup.scenario;
  std::vector<std::vector<CVector>> h(static_cast<std::size_t>(s.n_users()));
  for (int k = 0; k < s.n_users(); ++k) {
    h[static_cast<std::size_t>(k)].assign(static_cast<std::size_t>(s.L), CVector());
    const auto& u = s.users[static_cast<std::size_t>(k)];
    for (std::size_t m = 0; m < u.mpcs.size(); ++m)
      h[static_cast<std::size_t>(k)][static_cast<std::size_t>(u.mpcs[m].delay)] = draw_user_mpc(prep, setup, k, m, rng);
  }
  return h;
}

std::vector<std::vector<CMatrix>> draw_slow_time(const PreparedScenario& prep, const TrialSetup& setup,
                                                 const PilotSet& pilots, Rng& rng) {
  const auto& s = setup.scenario;
  std::vector<std::vector<cplx>> symbols;
  for (int k = 0; k < s.n_users(); ++k) symbols.push_back(pilot_symbols(pilots, k, s.T));
  std::vector<std::vector<CMatrix>> out(static_cast<std::size_t>(prep.front_end.n_sectors()));
  for (auto& per_sector : out)
    for (int j = 0; j < s.J; ++j) {
      const auto h = draw_trial_channels(prep, setup, rng);
      per_sector.push_back(synthesize_snapshot(h, symbols, s.L, s.T, s.array.n_antennas, s.noise_power, rng));
    }
  return out;
}

Acquisition acquire(const PreparedScenario& prep, const TrialSetup& setup, const PilotSet& pilots,
                    const std::vector<std::vector<CMatrix>>& snapshots, JadppMethod method, bool design) {
  const auto& s = setup.scenario;
  Acquisition a;
  a.method = method;
  std::vector<int> slots(static_cast<std::size_t>(s.n_users()));
  for (int k = 0; k < s.n_users(); ++k) slots[static_cast<std::size_t>(k)] = k;
  a.jadpp = estimate_jadpp(prep.front_end, snapshots, pilots, slots, s.T, method);
  a.map = build_sparsity_map(a.jadpp, s.p_fa_bar, guard_half_width(s.guard_deg, s.cell_deg()));
  a.detection = detection_metrics(a.map, s.users, prep.front_end.grid, s.L);
  if (!design) return a;

  const auto groups = setup.user_groups();
  a.estimated = build_group_covariances(build_user_ccms(a.map, a.jadpp, prep.steering), groups, s.n_groups,
                                        s.noise_power);
  const auto members = setup.members();
  std::vector<int> counts;
  for (const auto& m : members) counts.push_back(static_cast<int>(m.size()));
  a.d_g = allocate_group_chains(s.D, counts);
  const FloorPolicy policy = parse_floor_policy(s.rf_floor_policy);
  for (int g = 0; g < s.n_groups; ++g) {
    const auto support = group_support(a.map, members[static_cast<std::size_t>(g)], s.L);
    const auto clusters = cluster_mpcs(support, s.overlap_threshold);
    a.beams.push_back(build_statistical_beamformer(clusters, a.estimated.per_delay[static_cast<std::size_t>(g)],
                                                   a.estimated.r_y, a.d_g[static_cast<std::size_t>(g)], policy,
                                                   prep.fallback));
  }
  return a;
}

GroupCovariances true_group_covariances(const PreparedScenario& prep, const TrialSetup& setup) {
  const auto& s = setup.scenario;
  const int n = s.array.n_antennas;
  std::vector<std::vector<CMatrix>> per_user(static_cast<std::size_t>(s.n_users()));
  for (int k = 0; k < s.n_users(); ++k) {
    auto& pu = per_user[static_cast<std::size_t>(k)];
    pu.assign(static_cast<std::size_t>(s.L), CMatrix::Zero(n, n));
    const auto& u = s.users[static_cast<std::size_t>(k)];
    for (std::size_t m = 0; m < u.mpcs.size(); ++m)
      pu[static_cast<std::size_t>(u.mpcs[m].delay)] =
          u.mpcs[m].power * prep.unit_ccm[static_cast<std::size_t>(setup.source[static_cast<std::size_t>(k)])][m];
  }
  return assemble_group_covariances(per_user, setup.user_groups(), s.n_groups, n, s.noise_power);
}

FastDraw draw_fast_time(const PreparedScenario& prep, const TrialSetup& setup, const PilotSet& pilots, int group,
                        Rng& rng) {
  const auto& s = setup.scenario;
  const auto members = setup.members();
  const auto& mine = members[static_cast<std::size_t>(group)];
  FastDraw d;
  // Group-i.i.d. channels for the training group.
  for (std::size_t i = 0; i < mine.size(); ++i) {
    std::vector<CVector> h(static_cast<std::size_t>(s.L));
    for (int other : mine) {
      const auto& u = s.users[static_cast<std::size_t>(other)];
      for (std::size_t m = 0; m < u.mpcs.size(); ++m) {
        auto& slot = h[static_cast<std::size_t>(u.mpcs[m].delay)];
        const CVector v = draw_user_mpc(prep, setup, other, m, rng);
        if (slot.size() == 0) slot = v;
        else slot += v;
      }
    }
    d.h.push_back(std::move(h));
  }
  std::vector<std::vector<CVector>> channels;
  std::vector<std::vector<cplx>> symbols;
  for (std::size_t i = 0; i < mine.size(); ++i) {
    channels.push_back(d.h[i]);
    symbols.push_back(pilot_symbols(pilots, mine[i], s.T_fast));
  }
  for (int k = 0; k < s.n_users(); ++k) {
    if (s.users[static_cast<std::size_t>(k)].group == group) continue;
    std::vector<CVector> h(static_cast<std::size_t>(s.L));
    const auto& u = s.users[static_cast<std::size_t>(k)];
    for (std::size_t m = 0; m < u.mpcs.size(); ++m) h[static_cast<std::size_t>(u.mpcs[m].delay)] = draw_user_mpc(prep, setup, k, m, rng);
    channels.push_back(std::move(h));
    symbols.push_back(data_symbols(s.L, s.T_fast, rng));
  }
  d.y = synthesize_snapshot(channels, symbols, s.L, s.T_fast, s.array.n_antennas, s.noise_power, rng);
  return d;
}

std::vector<std::vector<FastDraw>> draw_fast_batch(const PreparedScenario& prep, const TrialSetup& setup,
                                                   const PilotSet& pilots, int draws, Rng& rng) {
  const auto members = setup.members();
  std::vector<std::vector<FastDraw>> out(members.size());
  for (std::size_t g = 0; g < members.size(); ++g) {
    if (members[g].empty()) continue;
    for (int d = 0; d < draws; ++d) out[g].push_back(draw_fast_time(prep, setup, pilots, static_cast<int>(g), rng));
  }
  return out;
}

std::vector<EstimatorOutcome> evaluate_estimators(const PreparedScenario& prep, const TrialSetup& setup,
                                                  const PilotSet& pilots, const Acquisition& acq,
                                                  const GroupCovariances& truth,
                                                  const std::vector<EstimatorKind>& kinds,
                                                  const std::vector<std::vector<FastDraw>>& draws) {
  (void)prep;
  const auto& s = setup.scenario;
  const auto members = setup.members();
  std::vector<EstimatorOutcome> out;
  for (int g = 0; g < s.n_groups; ++g) {
    const auto& mine = members[static_cast<std::size_t>(g)];
    const auto& beams = acq.beams[static_cast<std::size_t>(g)];
    if (mine.empty() || beams.d_g() == 0) continue;
    const CMatrix x = training_matrix(pilots, mine, s.T_fast);
    const auto& true_delay = truth.per_delay[static_cast<std::size_t>(g)];
    const auto& true_eta = truth.r_eta[static_cast<std::size_t>(g)];

    struct Job {
      EstimatorKind kind;
      bool true_ccm;
    };
    std::vector<Job> jobs;
    for (auto k : kinds) {
      jobs.push_back({k, false});
      if (k == EstimatorKind::rr_mmse) jobs.push_back({k, true});
    }
    // Effective channels and reduced observations are shared by all jobs.
    std::vector<CVector> h_eff, y_red;
    double energy = 0.0;
    if (static_cast<std::size_t>(g) < draws.size())
      for (const auto& d : draws[static_cast<std::size_t>(g)]) {
        h_eff.push_back(effective_channel(d.h, beams.s, s.L));
        y_red.push_back(reduce_observation(d.y, beams.s));
        energy += h_eff.back().squaredNorm();
      }
    for (const auto& job : jobs) {
      EstimatorOutcome e;
      e.group = g;
      e.kind = job.kind;
      e.true_ccm = job.true_ccm;
      try {
        CMatrix w;
        switch (job.kind) {
          case EstimatorKind::rr_mmse:
            w = job.true_ccm ? rr_mmse_matrix(x, true_delay, true_eta, beams.s, s.L)
                             : rr_mmse_matrix(x, acq.estimated.per_delay[static_cast<std::size_t>(g)],
                                              acq.estimated.r_eta[static_cast<std::size_t>(g)], beams.s, s.L);
            break;
          case EstimatorKind::ba_ls: w = ba_ls_matrix(x, beams, s.L, s.pinv_rtol); break;
          case EstimatorKind::ls: w = ls_matrix(x, beams.d_g()); break;
        }
        e.analytic = analytic_nmse(w, beams.s, true_delay, true_eta, x, s.L);
        e.emp_energy = energy;
        for (std::size_t i = 0; i < h_eff.size(); ++i) e.emp_err += (h_eff[i] - estimate_channels(w, y_red[i])).squaredNorm();
      } catch (const std::exception& ex) {
        e.error = ex.what();
        e.analytic = {};
        e.emp_err = e.emp_energy = 0.0;
      }
      out.push_back(std::move(e));
    }
  }
  return out;
}

TrialOutcome run_trial(const PreparedScenario& prep, const TrialSetup& setup, const TrialOptions& opt, Rng& rng) {
  TrialOutcome out;
  out.source = setup.source;
  out.user_group = setup.user_groups();
  const PilotSet pilots = trial_pilots(setup);
  const auto snapshots = draw_slow_time(prep, setup, pilots, rng);
  std::vector<std::vector<FastDraw>> draws;
  GroupCovariances truth;
  if (opt.fast_time) {
    draws = draw_fast_batch(prep, setup, pilots, opt.fast_draws, rng);
    truth = true_group_covariances(prep, setup);
  }
  for (auto method : opt.methods) {
    MethodOutcome mo;
    mo.method = method;
    const Acquisition acq = acquire(prep, setup, pilots, snapshots, method, opt.fast_time);
    mo.detection = acq.detection;
    if (opt.fast_time) mo.estimators = evaluate_estimators(prep, setup, pilots, acq, truth, opt.estimators, draws);
    out.methods.push_back(std::move(mo));
  }
  return out;
}

}  // namespace beamacq
