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

// JSON form of Scenario. Groups are 1-based in files, 0-based in memory.

#include "beamacq/scenario.hpp"

#include <json.hpp>

#include <filesystem>

namespace beamacq {

Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);

// Reads, parses and validates. Errors carry the file name.
Scenario load_scenario(const std::filesystem::path& path);

// FNV-1a over the compact dump; stable across runs and platforms.
std::uint64_t json_hash(const nlohmann::json& j);

}  // namespace beamacq
