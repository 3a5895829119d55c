// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

namespace lifi::neural {

// Dense (channels, rows, cols) activation block, row-major within a channel.
struct FeatureMap {
    int channels{0};
    int rows{0};
    int cols{0};
    std::vector<double> data;

    FeatureMap() = default;
    FeatureMap(int c, int r, int w)
        : channels(c), rows(r), cols(w),
          data(static_cast<std::size_t>(c) * static_cast<std::size_t>(r) * static_cast<std::size_t>(w),
               0.0) {}

    double& at(int c, int r, int x) {
        return data[(static_cast<std::size_t>(c) * static_cast<std::size_t>(rows) +
                     static_cast<std::size_t>(r)) *
                        static_cast<std::size_t>(cols) +
                    static_cast<std::size_t>(x)];
    }
    double at(int c, int r, int x) const {
        return data[(static_cast<std::size_t>(c) * static_cast<std::size_t>(rows) +
                     static_cast<std::size_t>(r)) *
                        static_cast<std::size_t>(cols) +
                    static_cast<std::size_t>(x)];
    }

    bool same_shape(const FeatureMap& other) const {
        return channels == other.channels && rows == other.rows && cols == other.cols;
    }
};

using Batch = std::vector<FeatureMap>;

inline void require_shape(const FeatureMap& fm, int c, int r, int w, const char* what) {
    if (fm.channels != c || fm.rows != r || fm.cols != w) {
        throw std::invalid_argument(std::string(what) + ": feature map shape mismatch");
    }
}

} // namespace lifi::neural
