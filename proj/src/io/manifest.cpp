// SPDX-License-Identifier: Apache-2.0

#include "lifi/io/manifest.hpp"

#include <array>
#include <cstdio>
#include <fstream>

#include <openssl/evp.h>

#include "lifi/common.hpp"
#include "lifi/io/atomic_file.hpp"

namespace lifi::io {

std::string toolkit_version() { return "lifisim 1.0.0"; }

std::string sha256_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(Errc::missing_file, "cannot open for hashing: " + path);

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error(Errc::internal, "cannot initialize SHA-256");
    }
    std::array<char, 65536> buf{};
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        const auto got = in.gcount();
        if (got > 0) EVP_DigestUpdate(ctx, buf.data(), static_cast<std::size_t>(got));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, digest.data(), &len);
    EVP_MD_CTX_free(ctx);

    std::string hex;
    hex.reserve(2 * len);
    for (unsigned int i = 0; i < len; ++i) {
        char b[3];
        std::snprintf(b, sizeof(b), "%02x", digest[i]);
        hex += b;
    }
    return hex;
}

void write_manifest(const std::string& path, const RunManifest& manifest) {
    nlohmann::json obj;
    obj["toolkit_version"] = manifest.toolkit_version;
    obj["command"] = manifest.command;
    obj["config"] = manifest.config;
    obj["inputs"] = nlohmann::json::array();
    for (const auto& [file, digest] : manifest.inputs) {
        obj["inputs"].push_back({{"path", file}, {"sha256", digest}});
    }
    obj["outputs"] = manifest.outputs;
    obj["duration_s"] = manifest.duration_s;
    atomic_write(path, obj.dump(2) + "\n");
}

} // namespace lifi::io
