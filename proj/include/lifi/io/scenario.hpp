// SPDX-License-Identifier: Apache-2.0
//
// Scenario (room / LED array / PD array / NLOS constants) as a JSON file.
// Schema documented in the README.

#pragma once

#include <string>

#include "lifi/channel.hpp"

namespace lifi::io {

channel::ScenarioConfig load_scenario(const std::string& path);
void save_scenario(const std::string& path, const channel::ScenarioConfig& scenario);

// Reference setup: one nadir LED at [0,0,3], a PD pair at the UE point
// [0,0,1] (one facing up, one sideways), constants from the published
// experiment table.
channel::ScenarioConfig default_scenario();

} // namespace lifi::io
