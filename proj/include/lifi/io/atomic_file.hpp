// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>

namespace lifi::io {

// Writes content to a sibling temporary file and renames it into place, so a
// failed run never leaves a partially written output behind.
void atomic_write(const std::string& path, const std::string& content);

} // namespace lifi::io
