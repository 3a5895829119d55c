// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace lifi::rng {

// One SplitMix64 step (Steele, Lea, Flood; public-domain reference constants).
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Derives a per-stage sub-seed from the global seed, so adding one pipeline
// stage never perturbs another stage's randomness.
inline std::uint64_t derive_seed(std::uint64_t global_seed, std::string_view stage_tag) {
    std::uint64_t state = global_seed ^ fnv1a64(stage_tag);
    return splitmix64(state);
}

// mt19937_64 engine with explicit uniform/normal mappings. std::*_distribution
// types are implementation-defined, so draws would differ across standard
// libraries; these mappings pin the exact output bits for a given seed.
class Generator {
  public:
    explicit Generator(std::uint64_t seed) : eng_(seed) {}

    std::uint64_t next_u64() { return eng_(); }

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }

    // Uniform on (0, 1]; safe as a log() argument.
    double uniform01_open_low() { return (static_cast<double>(eng_() >> 11) + 1.0) * 0x1.0p-53; }

    // Standard normal via Box-Muller (no cached spare, so every call consumes
    // exactly two engine draws and the stream position stays predictable).
    double normal() {
        const double u1 = uniform01_open_low();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    double normal(double mean, double stddev) { return mean + stddev * normal(); }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection sampling keeps the distribution exact.
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x;
        do {
            x = eng_();
        } while (x >= limit);
        return x % n;
    }

    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(below(i))]);
        }
    }

  private:
    std::mt19937_64 eng_;
};

} // namespace lifi::rng
