// SPDX-License-Identifier: Apache-2.0

#include "lifi/io/atomic_file.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

#include "lifi/common.hpp"

namespace lifi::io {

void atomic_write(const std::string& path, const std::string& content) {
    const std::string tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(Errc::internal, "cannot open for writing: " + tmp);
        out << content;
        out.flush();
        if (!out) {
            std::remove(tmp.c_str());
            throw Error(Errc::internal, "write failed: " + tmp);
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::remove(tmp.c_str());
        throw Error(Errc::internal, "cannot move " + tmp + " into place: " + ec.message());
    }
}

} // namespace lifi::io
