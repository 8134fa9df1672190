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

#include "beamacq/kernels.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <thread>
#include <tuple>

namespace beamacq {

namespace {

constexpr const char* kVersion = "0.1.0";

}  // namespace

std::string sweep_var_name(SweepVar v) {
  switch (v) {
    case SweepVar::snr_db: return "snr_db";
    case SweepVar::t_fast: return "t_fast";
    case SweepVar::j_snapshots: return "j_snapshots";
  }
  return "?";
}

SweepVar parse_sweep_var(const std::string& s) {
  if (s == "snr_db") return SweepVar::snr_db;
  if (s == "t_fast") return SweepVar::t_fast;
  if (s == "j_snapshots" || s == "J") return SweepVar::j_snapshots;
  throw ConfigError("sweep: unknown variable \"" + s + "\" (snr_db, t_fast, j_snapshots)");
}

void SweepSpec::validate() const {
  auto fail = [](const std::string& m) { throw ConfigError("sweep: " + m); };
  if (values.empty()) fail("at least one value is required");
  if (trials < 1) fail("trials must be >= 1");
  if (methods.empty()) fail("at least one method is required");
  if (fast_time && estimators.empty()) fail("at least one estimator is required");
  if (active_per_group < 0) fail("active_per_group must be >= 0");
  if (fast_draws < 0) fail("fast_draws must be >= 0");
  if (t_fast < 0 || j_snapshots < 0) fail("t_fast and j must be >= 0");
  for (double v : values) {
    if (!std::isfinite(v)) fail("values must be finite");
    if (variable != SweepVar::snr_db && (v < 1.0 || v != std::floor(v)))
      fail(sweep_var_name(variable) + " values must be positive integers");
  }
}

SweepSpec sweep_from_json(const nlohmann::json& j) {
  SweepSpec s;
  try {
    s.variable = parse_sweep_var(j.at("variable").get<std::string>());
    s.values = j.at("values").get<std::vector<double>>();
    s.trials = j.value("trials", s.trials);
    if (j.contains("methods")) {
      s.methods.clear();
      for (const auto& m : j["methods"]) s.methods.push_back(parse_method(m.get<std::string>()));
    }
    if (j.contains("estimators")) {
      s.estimators.clear();
      for (const auto& e : j["estimators"]) s.estimators.push_back(parse_estimator(e.get<std::string>()));
    }
    const std::string profile = j.value("power_profile", std::string("equal"));
    if (profile == "equal") s.power_profile = PowerProfile::equal;
    else if (profile == "near_far") s.power_profile = PowerProfile::near_far;
    else throw ConfigError("sweep: power_profile must be \"equal\" or \"near_far\"");
    s.near_far_step_db = j.value("near_far_step_db", s.near_far_step_db);
    s.active_per_group = j.value("active_per_group", s.active_per_group);
    s.fast_time = j.value("fast_time", s.fast_time);
    s.fast_draws = j.value("fast_draws", s.fast_draws);
    s.snr_db = j.value("snr_db", s.snr_db);
    s.t_fast = j.value("t_fast", s.t_fast);
    s.j_snapshots = j.value("j_snapshots", s.j_snapshots);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("sweep: ") + e.what());
  }
  s.validate();
  return s;
}

nlohmann::json sweep_to_json(const SweepSpec& s) {
  nlohmann::json j;
  j["variable"] = sweep_var_name(s.variable);
  j["values"] = s.values;
  j["trials"] = s.trials;
  j["methods"] = nlohmann::json::array();
  for (auto m : s.methods) j["methods"].push_back(method_name(m));
  j["estimators"] = nlohmann::json::array();
  for (auto e : s.estimators) j["estimators"].push_back(estimator_name(e));
  j["power_profile"] = s.power_profile == PowerProfile::equal ? "equal" : "near_far";
  j["near_far_step_db"] = s.near_far_step_db;
  j["active_per_group"] = s.active_per_group;
  j["fast_time"] = s.fast_time;
  j["fast_draws"] = s.fast_draws;
  j["snr_db"] = s.snr_db;
  j["t_fast"] = s.t_fast;
  j["j_snapshots"] = s.j_snapshots;
  return j;
}

SweepSpec load_sweep(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open sweep file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return sweep_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t master, std::uint64_t point, std::uint64_t trial) {
  return splitmix64(splitmix64(splitmix64(master) ^ point) ^ trial);
}

std::vector<double> group_powers_db(const SweepSpec& sweep, int n_groups, double snr_db) {
  std::vector<double> p(static_cast<std::size_t>(n_groups), snr_db);
  if (sweep.power_profile == PowerProfile::near_far)
    for (int g = 0; g < n_groups; ++g) p[static_cast<std::size_t>(g)] += sweep.near_far_step_db * g;
  return p;
}

TrialSetup setup_for_point(const PreparedScenario& prep, const SweepSpec& sweep, double value, Rng& rng) {
  const Scenario& base = prep.base;
  double snr = sweep.snr_db;
  int t_fast = sweep.t_fast;
  int J = sweep.j_snapshots;
  switch (sweep.variable) {
    case SweepVar::snr_db: snr = value; break;
    case SweepVar::t_fast: t_fast = static_cast<int>(value); break;
    case SweepVar::j_snapshots: J = static_cast<int>(value); break;
  }
  std::vector<int> active;
  if (sweep.active_per_group > 0) {
    for (int g = 0; g < base.n_groups; ++g) {
      std::vector<int> pool;
      for (int k = 0; k < base.n_users(); ++k)
        if (base.users[static_cast<std::size_t>(k)].group == g) pool.push_back(k);
      if (static_cast<int>(pool.size()) < sweep.active_per_group)
        throw ConfigError("sweep: group " + std::to_string(g + 1) + " has fewer than active_per_group users");
      // Partial Fisher-Yates; picks are kept in ascending user order.
      for (int i = 0; i < sweep.active_per_group; ++i) {
        std::uniform_int_distribution<int> pick(i, static_cast<int>(pool.size()) - 1);
        std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(pick(rng))]);
      }
      std::vector<int> chosen(pool.begin(), pool.begin() + sweep.active_per_group);
      std::sort(chosen.begin(), chosen.end());
      active.insert(active.end(), chosen.begin(), chosen.end());
    }
  }
  return make_setup(prep, active, group_powers_db(sweep, base.n_groups, snr), t_fast, J);
}

void trial_records(const TrialOutcome& t, const TrialSetup& setup, int point, double value, int trial,
                   std::uint64_t seed, std::vector<ResultRecord>& out) {
  const auto& s = setup.scenario;
  auto emit = [&](const std::string& method, const std::string& entity, int id, const std::string& est,
                  const std::string& prov, const std::string& metric, double v) {
    out.push_back(ResultRecord{point, value, trial, seed, method, entity, id, est, prov, metric, v});
  };
  for (const auto& mo : t.methods) {
    const std::string method = method_name(mo.method);
    // Detection: per user, per group (mean over its users) and overall.
    std::vector<double> gpd(static_cast<std::size_t>(s.n_groups), 0.0), gpfa(gpd);
    std::vector<int> gpd_n(gpd.size(), 0), gpfa_n(gpd.size(), 0);
    double apd = 0.0, apfa = 0.0;
    int apd_n = 0, apfa_n = 0;
    for (int k = 0; k < s.n_users(); ++k) {
      const auto& u = s.users[static_cast<std::size_t>(k)];
      const auto g = static_cast<std::size_t>(u.group);
      const double pd = mo.detection.pd[static_cast<std::size_t>(k)];
      const double pfa = mo.detection.pfa[static_cast<std::size_t>(k)];
      if (!std::isnan(pd)) {
        emit(method, "user", u.id, "", "", "pd", pd);
        gpd[g] += pd;
        ++gpd_n[g];
        apd += pd;
        ++apd_n;
      }
      emit(method, "user", u.id, "", "", "pfa", pfa);
      gpfa[g] += pfa;
      ++gpfa_n[g];
      apfa += pfa;
      ++apfa_n;
    }
    for (std::size_t g = 0; g < gpd.size(); ++g) {
      if (gpd_n[g] > 0) emit(method, "group", static_cast<int>(g) + 1, "", "", "pd", gpd[g] / gpd_n[g]);
      if (gpfa_n[g] > 0) emit(method, "group", static_cast<int>(g) + 1, "", "", "pfa", gpfa[g] / gpfa_n[g]);
    }
    if (apd_n > 0) emit(method, "all", 0, "", "", "pd", apd / apd_n);
    if (apfa_n > 0) emit(method, "all", 0, "", "", "pfa", apfa / apfa_n);

    for (const auto& e : mo.estimators) {
      if (!e.error.empty()) continue;
      const std::string est = estimator_name(e.kind);
      const std::string prov = e.true_ccm ? "true" : "estimated";
      const int id = e.group + 1;
      emit(method, "group", id, est, prov, "nmse_analytic_num", e.analytic.numerator);
      emit(method, "group", id, est, prov, "nmse_analytic_den", e.analytic.denominator);
      if (e.emp_energy > 0.0) {
        emit(method, "group", id, est, prov, "nmse_empirical_num", e.emp_err);
        emit(method, "group", id, est, prov, "nmse_empirical_den", e.emp_energy);
      }
    }
  }
}

SweepResult run_sweep(const Scenario& scenario, const SweepSpec& sweep, std::uint64_t master_seed, int threads) {
  sweep.validate();
  scenario.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const PreparedScenario prep = prepare_scenario(scenario);

  TrialOptions opt;
  opt.methods = sweep.methods;
  opt.estimators = sweep.estimators;
  opt.fast_time = sweep.fast_time;
  opt.fast_draws = sweep.fast_draws;

  const int n_points = static_cast<int>(sweep.values.size());
  const int n_jobs = n_points * sweep.trials;
  struct Slot {
    std::vector<ResultRecord> records;
    std::string error;
    std::uint64_t seed = 0;
    double seconds = 0.0;
  };
  std::vector<Slot> slots(static_cast<std::size_t>(n_jobs));
  std::atomic<int> next{0};

  auto worker = [&]() {
    for (;;) {
      const int job = next.fetch_add(1);
      if (job >= n_jobs) return;
      const int point = job / sweep.trials;
      const int trial = job % sweep.trials;
      const double value = sweep.values[static_cast<std::size_t>(point)];
      Slot& slot = slots[static_cast<std::size_t>(job)];
      slot.seed = trial_seed(master_seed, static_cast<std::uint64_t>(point), static_cast<std::uint64_t>(trial));
      const auto start = std::chrono::steady_clock::now();
      try {
        Rng rng(slot.seed);
        const TrialSetup setup = setup_for_point(prep, sweep, value, rng);
        const TrialOutcome out = run_trial(prep, setup, opt, rng);
        trial_records(out, setup, point, value, trial, slot.seed, slot.records);
        for (const auto& mo : out.methods)
          for (const auto& e : mo.estimators)
            if (!e.error.empty())
              slot.error += (slot.error.empty() ? "" : "; ") + std::string(method_name(mo.method)) + "/" +
                            estimator_name(e.kind) + (e.true_ccm ? "(true)" : "") + " group " +
                            std::to_string(e.group + 1) + ": " + e.error;
      } catch (const std::exception& ex) {
        slot.records.clear();
        slot.error = ex.what();
      }
      slot.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };

  threads = std::max(1, std::min(threads, n_jobs));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  SweepResult r;
  r.threads = threads;
  r.point_seconds.assign(static_cast<std::size_t>(n_points), 0.0);
  for (int job = 0; job < n_jobs; ++job) {
    auto& slot = slots[static_cast<std::size_t>(job)];
    const int point = job / sweep.trials;
    r.point_seconds[static_cast<std::size_t>(point)] += slot.seconds;
    if (!slot.error.empty()) {
      spdlog::warn("point {} trial {}: {}", point, job % sweep.trials, slot.error);
      r.errors.push_back(TrialError{point, job % sweep.trials, slot.seed, slot.error});
    }
    r.records.insert(r.records.end(), std::make_move_iterator(slot.records.begin()),
                     std::make_move_iterator(slot.records.end()));
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

namespace {

struct Key {
  int point;
  std::string method, entity;
  int entity_id;
  std::string estimator, provenance, metric;
  auto tie() const { return std::tie(point, method, entity, entity_id, estimator, provenance, metric); }
  bool operator<(const Key& o) const { return tie() < o.tie(); }
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

std::string entity_label(const std::string& entity, int id) { return entity == "all" ? entity : entity + std::to_string(id); }

void mean_stderr(const std::vector<double>& x, double& mean, double& se) {
  const double n = static_cast<double>(x.size());
  mean = 0.0;
  for (double v : x) mean += v;
  mean /= n;
  double ss = 0.0;
  for (double v : x) ss += (v - mean) * (v - mean);
  se = x.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
}

}  // namespace

std::vector<CurveRow> aggregate(const std::vector<ResultRecord>& records, const std::string& sweep_var) {
  std::map<int, double> point_value;
  std::map<Key, std::vector<std::pair<int, double>>> plain;  // (trial, value)
  std::map<Key, std::map<int, std::pair<double, double>>> ratio;  // trial -> (num, den)
  for (const auto& r : records) {
    point_value[r.point] = r.sweep_value;
    Key k{r.point, r.method, r.entity, r.entity_id, r.estimator, r.provenance, r.metric};
    if (ends_with(r.metric, "_num")) {
      k.metric.resize(k.metric.size() - 4);
      ratio[k][r.trial].first = r.value;
    } else if (ends_with(r.metric, "_den")) {
      k.metric.resize(k.metric.size() - 4);
      ratio[k][r.trial].second = r.value;
    } else {
      plain[k].emplace_back(r.trial, r.value);
    }
  }

  std::vector<CurveRow> rows;
  auto row = [&](const Key& k, const std::string& entity, double mean, double se, int n) {
    rows.push_back(CurveRow{sweep_var, point_value[k.point], k.method, k.metric, entity, k.estimator, k.provenance,
                            mean, se, n});
  };
  for (auto& [k, tv] : plain) {
    // Trial order, so the sums do not depend on record order.
    std::sort(tv.begin(), tv.end());
    std::vector<double> xs;
    for (const auto& p : tv) xs.push_back(p.second);
    double m, se;
    mean_stderr(xs, m, se);
    row(k, entity_label(k.entity, k.entity_id), m, se, static_cast<int>(xs.size()));
  }

  // Ratio of means with delta-method error; "avg" collects group ratios.
  std::map<Key, std::vector<std::pair<double, double>>> avg;
  for (const auto& [k, trials] : ratio) {
    std::vector<double> num, den;
    for (const auto& [t, nd] : trials) {
      num.push_back(nd.first);
      den.push_back(nd.second);
    }
    const double n = static_cast<double>(num.size());
    double mn = 0.0, md = 0.0;
    for (std::size_t i = 0; i < num.size(); ++i) {
      mn += num[i];
      md += den[i];
    }
    mn /= n;
    md /= n;
    const double r = md != 0.0 ? mn / md : std::nan("");
    double se = 0.0;
    if (num.size() > 1 && md != 0.0) {
      double ss = 0.0;
      for (std::size_t i = 0; i < num.size(); ++i) {
        const double e = num[i] - r * den[i];
        ss += e * e;
      }
      se = std::sqrt(ss / (n - 1.0) / n) / std::abs(md);
    }
    row(k, entity_label(k.entity, k.entity_id), r, se, static_cast<int>(num.size()));
    if (k.entity == "group") {
      Key a = k;
      a.entity = "avg";
      a.entity_id = 0;
      avg[a].emplace_back(r, se);
    }
  }
  for (const auto& [k, rs] : avg) {
    double m = 0.0, v = 0.0;
    for (const auto& [r, se] : rs) {
      m += r;
      v += se * se;
    }
    const double g = static_cast<double>(rs.size());
    row(k, "avg", m / g, std::sqrt(v) / g, static_cast<int>(rs.size()));
  }

  std::stable_sort(rows.begin(), rows.end(), [](const CurveRow& a, const CurveRow& b) {
    return std::tie(a.sweep_value, a.method, a.metric, a.entity, a.estimator, a.provenance) <
           std::tie(b.sweep_value, b.method, b.metric, b.entity, b.estimator, b.provenance);
  });
  return rows;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void write_records_csv(std::ostream& os, const std::vector<ResultRecord>& records) {
  os << "point,sweep_value,trial,trial_seed,method,entity,entity_id,estimator,provenance,metric,value\n";
  for (const auto& r : records)
    os << r.point << ',' << format_double(r.sweep_value) << ',' << r.trial << ',' << r.trial_seed << ','
       << r.method << ',' << r.entity << ',' << r.entity_id << ',' << r.estimator << ',' << r.provenance << ','
       << r.metric << ',' << format_double(r.value) << '\n';
}

void write_curves_csv(std::ostream& os, const std::vector<CurveRow>& rows) {
  os << "sweep_var,sweep_value,method,metric,entity,estimator,provenance,mean,stderr,n\n";
  for (const auto& r : rows)
    os << r.sweep_var << ',' << format_double(r.sweep_value) << ',' << r.method << ',' << r.metric << ','
       << r.entity << ',' << r.estimator << ',' << r.provenance << ',' << format_double(r.mean) << ','
       << format_double(r.stderr_) << ',' << r.n << '\n';
}

nlohmann::json run_manifest(const nlohmann::json& scenario, const nlohmann::json& sweep, std::uint64_t master_seed,
                            const SweepResult& result) {
  nlohmann::json m;
  m["version"] = kVersion;
  m["master_seed"] = master_seed;
  m["scenario_hash"] = json_hash(scenario);
  m["sweep_hash"] = json_hash(sweep);
  m["scenario"] = scenario;
  m["sweep"] = sweep;
  m["eigen_version"] = std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                       std::to_string(EIGEN_MINOR_VERSION);
  m["spdlog_version"] = std::to_string(SPDLOG_VER_MAJOR) + "." + std::to_string(SPDLOG_VER_MINOR) + "." +
                        std::to_string(SPDLOG_VER_PATCH);
  m["kernel_isa"] = std::string(kernels::isa_name(kernels::active_isa()));
  m["threads"] = result.threads;
  m["wall_seconds"] = result.wall_seconds;
  m["point_seconds"] = result.point_seconds;
  m["n_records"] = result.records.size();
  m["errors"] = nlohmann::json::array();
  for (const auto& e : result.errors)
    m["errors"].push_back({{"point", e.point}, {"trial", e.trial}, {"trial_seed", e.trial_seed}, {"message", e.message}});
  return m;
}

SweepResult run_and_persist(const Scenario& scenario, const nlohmann::json& scenario_json, const SweepSpec& sweep,
                            std::uint64_t master_seed, const std::filesystem::path& out_dir, int threads) {
  std::filesystem::create_directories(out_dir);
  SweepResult r = run_sweep(scenario, sweep, master_seed, threads);
  const auto rows = aggregate(r.records, sweep_var_name(sweep.variable));
  auto open = [&](const char* name) {
    std::ofstream f(out_dir / name, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + (out_dir / name).string());
    return f;
  };
  {
    auto f = open("records.csv");
    write_records_csv(f, r.records);
  }
  {
    auto f = open("curves.csv");
    write_curves_csv(f, rows);
  }
  {
    auto f = open("manifest.json");
    f << run_manifest(scenario_json, sweep_to_json(sweep), master_seed, r).dump(2) << '\n';
  }
  return r;
}

}  // namespace beamacq
