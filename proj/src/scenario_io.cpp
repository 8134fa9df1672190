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

#include "beamacq/scenario_io.hpp"

#include <fstream>

namespace beamacq {

namespace {

template <typename T>
void read_opt(const nlohmann::json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario s;
  try {
    read_opt(j, "name", s.name);
    s.array.n_antennas = j.at("n_antennas").get<int>();
    read_opt(j, "groups", s.n_groups);
    s.L = j.at("L").get<int>();
    s.T = j.at("T").get<int>();
    s.T_fast = j.value("T_fast", s.T);
    s.D = j.at("D").get<int>();
    s.D_search = j.at("D_search").get<int>();
    s.M = j.at("M").get<int>();
    if (j.contains("sector_deg")) {
      const auto& sec = j.at("sector_deg");
      if (!sec.is_array() || sec.size() != 2) throw ConfigError("sector_deg must be [min, max]");
      s.sector_min_deg = sec[0].get<double>();
      s.sector_max_deg = sec[1].get<double>();
    }
    read_opt(j, "sub_sector_deg", s.sub_sector_deg);
    read_opt(j, "look_spread_deg", s.look_spread_deg);
    read_opt(j, "J", s.J);
    read_opt(j, "p_fa_bar", s.p_fa_bar);
    read_opt(j, "guard_deg", s.guard_deg);
    read_opt(j, "overlap_threshold", s.overlap_threshold);
    read_opt(j, "noise_power", s.noise_power);
    read_opt(j, "n_rays", s.n_rays);
    read_opt(j, "quad_points", s.quad_points);
    read_opt(j, "pinv_rtol", s.pinv_rtol);
    read_opt(j, "rf_floor_policy", s.rf_floor_policy);
    read_opt(j, "seed", s.seed);
    const double default_db = j.value("power_db", 30.0);
    int next_id = 1;
    for (const auto& ju : j.at("users")) {
      UserSpec u;
      u.id = ju.value("id", next_id);
      next_id = u.id + 1;
      u.group = ju.value("group", 1) - 1;
      u.power_db = ju.value("power_db", default_db);
      for (const auto& jm : ju.at("mpcs")) {
        MpcSpec m;
        m.delay = jm.at("delay").get<int>();
        m.mean_aoa_deg = jm.at("aoa_deg").get<double>();
        m.spread_deg = jm.at("spread_deg").get<double>();
        m.relative_weight = jm.value("weight", 1.0);
        if (!(m.relative_weight > 0.0)) throw ConfigError("mpc weight must be > 0");
        u.mpcs.push_back(m);
      }
      s.users.push_back(std::move(u));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("scenario JSON: ") + e.what());
  }
  s.refresh_powers();
  s.validate();
  return s;
}

nlohmann::json scenario_to_json(const Scenario& s) {
  nlohmann::json j;
  j["name"] = s.name;
  j["n_antennas"] = s.array.n_antennas;
  j["groups"] = s.n_groups;
  j["L"] = s.L;
  j["T"] = s.T;
  j["T_fast"] = s.T_fast;
  j["D"] = s.D;
  j["D_search"] = s.D_search;
  j["M"] = s.M;
  j["sector_deg"] = {s.sector_min_deg, s.sector_max_deg};
  j["sub_sector_deg"] = s.sub_sector_deg;
  j["look_spread_deg"] = s.look_spread_deg;
  j["J"] = s.J;
  j["p_fa_bar"] = s.p_fa_bar;
  j["guard_deg"] = s.guard_deg;
  j["overlap_threshold"] = s.overlap_threshold;
  j["noise_power"] = s.noise_power;
  j["n_rays"] = s.n_rays;
  j["quad_points"] = s.quad_points;
  j["pinv_rtol"] = s.pinv_rtol;
  j["rf_floor_policy"] = s.rf_floor_policy;
  j["seed"] = s.seed;
  nlohmann::json users = nlohmann::json::array();
  for (const auto& u : s.users) {
    nlohmann::json ju;
    ju["id"] = u.id;
    ju["group"] = u.group + 1;
    ju["power_db"] = u.power_db;
    nlohmann::json mpcs = nlohmann::json::array();
    for (const auto& m : u.mpcs)
      mpcs.push_back({{"delay", m.delay}, {"aoa_deg", m.mean_aoa_deg}, {"spread_deg", m.spread_deg},
                      {"weight", m.relative_weight}});
    ju["mpcs"] = std::move(mpcs);
    users.push_back(std::move(ju));
  }
  j["users"] = std::move(users);
  return j;
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file " + path.string());
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  try {
    return scenario_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::uint64_t json_hash(const nlohmann::json& j) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : j.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace beamacq
