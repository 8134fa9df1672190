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

// Seeded Monte Carlo sweeps, result records, aggregation and persistence.

#include "beamacq/pipeline.hpp"
#include "beamacq/scenario_io.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace beamacq {

enum class SweepVar { snr_db, t_fast, j_snapshots };
std::string sweep_var_name(SweepVar v);
SweepVar parse_sweep_var(const std::string& s);

enum class PowerProfile { equal, near_far };

struct SweepSpec {
  SweepVar variable = SweepVar::snr_db;
  std::vector<double> values;
  int trials = 1;
  std::vector<JadppMethod> methods{JadppMethod::amf, JadppMethod::mf};
  std::vector<EstimatorKind> estimators{EstimatorKind::rr_mmse, EstimatorKind::ba_ls, EstimatorKind::ls};
  PowerProfile power_profile = PowerProfile::equal;
  double near_far_step_db = 5.0;  // group g (0-based) sits g * step above group 0
  int active_per_group = 0;       // 0: every user is active
  bool fast_time = true;
  int fast_draws = 4;
  // Values of the variables not being swept. 0 keeps the scenario value.
  double snr_db = 30.0;
  int t_fast = 0;
  int j_snapshots = 0;

  void validate() const;
};

SweepSpec sweep_from_json(const nlohmann::json& j);
nlohmann::json sweep_to_json(const SweepSpec& s);
SweepSpec load_sweep(const std::filesystem::path& path);

// Counter-based seed of trial `trial` at sweep point `point`.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t trial_seed(std::uint64_t master, std::uint64_t point, std::uint64_t trial);

// Per-group SNR (dB) at a sweep point.
std::vector<double> group_powers_db(const SweepSpec& sweep, int n_groups, double snr_db);

// Trial configuration at a sweep point: draws the active users (if
// active_per_group is set) from rng and applies powers, T_fast and J.
TrialSetup setup_for_point(const PreparedScenario& prep, const SweepSpec& sweep, double value, Rng& rng);

// One scalar observation. entity is "user", "group" or "all" (ids are
// 1-based; 0 for "all"). nMSE is stored as numerator/denominator pairs so it
// can be averaged as a ratio of means.
struct ResultRecord {
  int point = 0;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t trial_seed = 0;
  std::string method;
  std::string entity;
  int entity_id = 0;
  std::string estimator;
  std::string provenance;
  std::string metric;
  double value = 0.0;
};

struct TrialError {
  int point = 0;
  int trial = 0;
  std::uint64_t trial_seed = 0;
  std::string message;
};

struct SweepResult {
  std::vector<ResultRecord> records;  // ordered by (point, trial)
  std::vector<TrialError> errors;
  std::vector<double> point_seconds;  // summed trial CPU-side wall time per point
  double wall_seconds = 0.0;
  int threads = 1;
};

// Flattens one trial into records (appends to out).
void trial_records(const TrialOutcome& t, const TrialSetup& setup, int point, double value, int trial,
                   std::uint64_t seed, std::vector<ResultRecord>& out);

SweepResult run_sweep(const Scenario& scenario, const SweepSpec& sweep, std::uint64_t master_seed, int threads = 1);

struct CurveRow {
  std::string sweep_var;
  double sweep_value = 0.0;
  std::string method;
  std::string metric;
  std::string entity;  // e.g. "group2", "user5", "all", "avg"
  std::string estimator;
  std::string provenance;
  double mean = 0.0;
  double stderr_ = 0.0;
  int n = 0;
};

// Plain metrics: sample mean and standard error over records sharing a key.
// *_num / *_den pairs: ratio of means with a delta-method standard error,
// reported under the stem (e.g. nmse_analytic). "avg" rows average the
// per-group nMSE ratios.
std::vector<CurveRow> aggregate(const std::vector<ResultRecord>& records, const std::string& sweep_var);

void write_records_csv(std::ostream& os, const std::vector<ResultRecord>& records);
void write_curves_csv(std::ostream& os, const std::vector<CurveRow>& rows);
nlohmann::json run_manifest(const nlohmann::json& scenario, const nlohmann::json& sweep, std::uint64_t master_seed,
                            const SweepResult& result);

// Runs, aggregates and writes curves.csv, records.csv and manifest.json.
SweepResult run_and_persist(const Scenario& scenario, const nlohmann::json& scenario_json, const SweepSpec& sweep,
                            std::uint64_t master_seed, const std::filesystem::path& out_dir, int threads);

// Shortest round-trippable text for CSV cells.
std::string format_double(double v);

}  // namespace beamacq
