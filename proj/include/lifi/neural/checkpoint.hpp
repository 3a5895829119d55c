// SPDX-License-Identifier: Apache-2.0
//
// Portable JSON checkpoints: layer list with shape-tagged weight arrays.

#pragma once

#include <string>

#include "lifi/neural/cdrn.hpp"
#include "lifi/neural/tracker.hpp"

namespace lifi::neural {

void save_cdrn(const std::string& path, const CdrnModel& model);
CdrnModel load_cdrn(const std::string& path);

void save_tracker(const std::string& path, const TrackerModel& model);
TrackerModel load_tracker(const std::string& path);

} // namespace lifi::neural
