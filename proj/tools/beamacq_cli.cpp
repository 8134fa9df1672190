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

// Command-line front end: pilots, acquire, design, estimate, simulate.

#include "beamacq/harness.hpp"
#include "beamacq/kernels.hpp"
#include "beamacq/scenario_io.hpp"

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <fstream>
#include <iostream>
#include <optional>

using namespace beamacq;

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 1;
  std::string method = "amf";
  std::optional<double> snr_db;
  std::string out;
};

std::ostream& output(const std::string& path, std::ofstream& file) {
  if (path.empty() || path == "-") return std::cout;
  file.open(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot write " + path);
  return file;
}

// Single acquisition at the scenario's own powers (or a common SNR).
struct OneShot {
  PreparedScenario prep;
  TrialSetup setup;
  PilotSet pilots;
  Acquisition acq;
};

OneShot one_shot(const Common& c, bool design) {
  const Scenario s = load_scenario(c.config);
  OneShot o{prepare_scenario(s), {}, {}, {}};
  std::vector<double> powers;
  if (c.snr_db) powers.assign(static_cast<std::size_t>(s.n_groups), *c.snr_db);
  o.setup = make_setup(o.prep, {}, powers, 0, 0);
  o.pilots = trial_pilots(o.setup);
  Rng rng(c.seed);
  const auto snaps = draw_slow_time(o.prep, o.setup, o.pilots, rng);
  o.acq = acquire(o.prep, o.setup, o.pilots, snaps, parse_method(c.method), design);
  return o;
}

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "scenario JSON")->required()->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "RNG seed");
  app->add_option("--method", c.method, "amf or mf");
  app->add_option("--snr", c.snr_db, "override every user's SNR (dB)");
  app->add_option("--out", c.out, "output CSV (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Beam-domain channel acquisition simulator"};
  app.require_subcommand(1);
  std::string log_level = "warn";
  app.add_option("--log-level", log_level, "trace|debug|info|warn|error|off");
  std::string isa;
  app.add_option("--isa", isa, "force kernel ISA: scalar or avx2");

  // pilots
  auto* pil = app.add_subcommand("pilots", "dump Kasami pilot chips");
  int p_users = 8, p_len = 63, p_L = 32;
  std::uint64_t p_seed = 0;
  std::string p_out;
  pil->add_option("--users", p_users, "number of codes (<= 8)");
  pil->add_option("--length", p_len, "sequence length (<= 63)");
  pil->add_option("--L", p_L, "channel memory");
  pil->add_option("--seed", p_seed, "cyclic shift seed");
  pil->add_option("--out", p_out, "output CSV (default stdout)");

  Common ac, de, es;
  auto* acq = app.add_subcommand("acquire", "slow-time acquisition and sparsity map");
  add_common(acq, ac);
  bool all_cells = false;
  acq->add_flag("--all-cells", all_cells, "emit every grid cell, not only detections");

  auto* des = app.add_subcommand("design", "beam design and beam patterns");
  add_common(des, de);
  std::string spectra_out;
  des->add_option("--spectra", spectra_out, "also write allocation eigenvalues to this CSV");

  auto* est = app.add_subcommand("estimate", "fast-time nMSE over a sweep");
  add_common(est, es);
  std::string est_sweep, per_trial_out, nmse_kind = "analytic";
  int est_threads = 1;
  est->add_option("--sweep", est_sweep, "sweep JSON")->required()->check(CLI::ExistingFile);
  est->add_option("--per-trial", per_trial_out, "per-trial nMSE CSV");
  est->add_option("--kind", nmse_kind, "analytic or empirical")->check(CLI::IsMember({"analytic", "empirical"}));
  est->add_option("--threads", est_threads, "worker threads");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo sweep to curves.csv, records.csv, manifest.json");
  std::string sim_config, sim_sweep, sim_out;
  std::uint64_t sim_seed = 1;
  int sim_threads = 1;
  sim->add_option("--config", sim_config, "scenario JSON")->required();
  sim->add_option("--sweep", sim_sweep, "sweep JSON")->required();
  sim->add_option("--seed", sim_seed, "master seed")->required();
  sim->add_option("--out", sim_out, "output directory")->required();
  sim->add_option("--threads", sim_threads, "worker threads")->check(CLI::PositiveNumber);

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(spdlog::level::from_str(log_level));

  try {
    if (!isa.empty()) kernels::set_isa(isa == "avx2" ? kernels::Isa::avx2 : kernels::Isa::scalar);

    if (*pil) {
      std::ofstream f;
      write_pilots_csv(output(p_out, f), kasami_pilots(p_users, p_len, p_L, p_seed));
    } else if (*acq) {
      const OneShot o = one_shot(ac, false);
      std::ofstream f;
      auto& os = output(ac.out, f);
      os << "user,delay,angle_deg,beta_hat,detected\n";
      const auto& grid = o.prep.front_end.grid;
      for (int k = 0; k < o.setup.scenario.n_users(); ++k) {
        const auto& beta = o.acq.jadpp.beta[static_cast<std::size_t>(k)];
        const auto& map = o.acq.map.maps[static_cast<std::size_t>(k)];
        for (Index l = 0; l < beta.cols(); ++l)
          for (Index i = 0; i < beta.rows(); ++i)
            if (all_cells || map(i, l))
              os << o.setup.scenario.users[static_cast<std::size_t>(k)].id << ',' << l << ','
                 << format_double(grid.angles_deg[static_cast<std::size_t>(i)]) << ',' << format_double(beta(i, l))
                 << ',' << int(map(i, l)) << '\n';
      }
    } else if (*des) {
      const OneShot o = one_shot(de, true);
      std::ofstream f;
      auto& os = output(de.out, f);
      os << "group,beam,angle_deg,gain\n";
      const auto& grid = o.prep.front_end.grid;
      for (std::size_t g = 0; g < o.acq.beams.size(); ++g) {
        const CMatrix& s = o.acq.beams[g].s;
        for (Index d = 0; d < s.cols(); ++d)
          for (int i = 0; i < grid.size(); ++i)
            os << g + 1 << ',' << d << ',' << format_double(grid.angles_deg[static_cast<std::size_t>(i)]) << ','
               << format_double(std::norm(s.col(d).dot(o.prep.steering.col(i)))) << '\n';
      }
      if (!spectra_out.empty()) {
        std::ofstream sf(spectra_out, std::ios::binary);
        if (!sf) throw std::runtime_error("cannot write " + spectra_out);
        sf << "group,cluster,delays,chains,index,lambda\n";
        for (std::size_t g = 0; g < o.acq.beams.size(); ++g) {
          const auto& b = o.acq.beams[g];
          for (std::size_t c = 0; c < b.clusters.size(); ++c) {
            std::string delays;
            for (int l : b.clusters[c]) delays += (delays.empty() ? "" : " ") + std::to_string(l);
            for (Index i = 0; i < b.lambdas[c].size(); ++i)
              sf << g + 1 << ',' << c << ',' << delays << ',' << b.d[c] << ',' << i << ','
                 << format_double(b.lambdas[c](i)) << '\n';
          }
        }
      }
    } else if (*est) {
      const Scenario s = load_scenario(es.config);
      SweepSpec sw = load_sweep(est_sweep);
      sw.methods = {parse_method(es.method)};
      sw.fast_time = true;
      const SweepResult r = run_sweep(s, sw, es.seed, est_threads);
      auto fixed = [&](double v) {
        double snr = sw.snr_db, tf = sw.t_fast > 0 ? sw.t_fast : s.T_fast, j = sw.j_snapshots > 0 ? sw.j_snapshots : s.J;
        if (sw.variable == SweepVar::snr_db) snr = v;
        if (sw.variable == SweepVar::t_fast) tf = v;
        if (sw.variable == SweepVar::j_snapshots) j = v;
        return format_double(snr) + ',' + format_double(tf) + ',' + format_double(j);
      };
      const std::string metric = "nmse_" + nmse_kind;
      if (!per_trial_out.empty()) {
        std::ofstream pf(per_trial_out, std::ios::binary);
        if (!pf) throw std::runtime_error("cannot write " + per_trial_out);
        pf << "trial,group,estimator,provenance,snr_db,t_fast,j,nmse\n";
        double num = 0.0;
        for (const auto& rec : r.records) {
          if (rec.metric == metric + "_num") num = rec.value;
          if (rec.metric == metric + "_den")
            pf << rec.trial << ',' << rec.entity_id << ',' << rec.estimator << ',' << rec.provenance << ':'
               << rec.method << ',' << fixed(rec.sweep_value) << ',' << format_double(num / rec.value) << '\n';
        }
      }
      std::ofstream f;
      auto& os = output(es.out, f);
      os << "group,estimator,provenance,snr_db,t_fast,j,nmse\n";
      for (const auto& row : aggregate(r.records, sweep_var_name(sw.variable))) {
        if (row.metric != metric) continue;
        const std::string group = row.entity.rfind("group", 0) == 0 ? row.entity.substr(5) : row.entity;
        os << group << ',' << row.estimator << ',' << row.provenance << ':' << row.method << ','
           << fixed(row.sweep_value) << ',' << format_double(row.mean) << '\n';
      }
      if (!r.errors.empty()) std::cerr << r.errors.size() << " trial(s) failed; see warnings above\n";
    } else if (*sim) {
      std::ifstream in(sim_config);
      if (!in) throw ConfigError("cannot open scenario file " + sim_config);
      nlohmann::json sj;
      try {
        in >> sj;
      } catch (const nlohmann::json::exception& e) {
        throw ConfigError(sim_config + ": " + e.what());
      }
      const Scenario s = load_scenario(sim_config);
      const SweepSpec sw = load_sweep(sim_sweep);
      const SweepResult r = run_and_persist(s, sj, sw, sim_seed, sim_out, sim_threads);
      std::cerr << "wrote " << r.records.size() << " records to " << sim_out << " (" << r.errors.size()
                << " failed trials, " << format_double(r.wall_seconds) << " s)\n";
    }
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
