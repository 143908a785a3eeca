// Copyright 2026 The trmac-sim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "trmac/sim/scenario.hpp"

namespace trmac::config {

/// Parses a JSON scenario. Absent fields keep their defaults; unknown fields
/// and wrong types raise ConfigError naming the dotted field path. The result
/// is neither materialized nor validated.
sim::Scenario parse_scenario(std::string_view json_text);

/// parse + materialize + validate. A relative arrival-file path is resolved
/// against the scenario file's directory.
sim::Scenario load_scenario(const std::filesystem::path& path);

/// As above, applying "key=value" overrides after parsing and before
/// materialization, so a seed override also moves the random topology.
sim::Scenario load_scenario(const std::filesystem::path& path,
                            const std::vector<std::string>& overrides);

/// Canonical JSON with every field spelled out. parse_scenario(emit_scenario(s)) == s.
std::string emit_scenario(const sim::Scenario& scenario);

/// Hex FNV-1a digest of the canonical JSON.
std::string config_hash(const sim::Scenario& scenario);

/// Applies "section.field=value". The value is read as JSON when it parses as
/// JSON and as a bare string otherwise, so `mac.protocol=csma_ca` works.
void apply_override(sim::Scenario& scenario, std::string_view assignment);

}  // namespace trmac::config
