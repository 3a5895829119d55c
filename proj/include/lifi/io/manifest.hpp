// SPDX-License-Identifier: Apache-2.0
//
// Run manifest: resolved config snapshot, input digests, and the output file
// list, written atomically once a run has completed.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

namespace lifi::io {

struct RunManifest {
    std::string toolkit_version;
    std::string command;
    nlohmann::json config;
    std::vector<std::pair<std::string, std::string>> inputs; // (path, sha256)
    std::vector<std::string> outputs;
    double duration_s{0.0};
};

std::string toolkit_version();

std::string sha256_file(const std::string& path);

void write_manifest(const std::string& path, const RunManifest& manifest);

} // namespace lifi::io
