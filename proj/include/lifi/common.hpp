// SPDX-License-Identifier: Apache-2.0
//
// lifisim -- mobile LiFi channel simulation and analysis toolkit

#pragma once

#include <stdexcept>
#include <string>

namespace lifi {

constexpr double kPi = 3.14159265358979323846;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

// Error categories, mapped 1:1 onto CLI exit codes.
enum class Errc : int {
    internal = 1,
    config = 2,
    missing_file = 3,
    parse = 4,
    infeasible = 5,
};

class Error : public std::runtime_error {
  public:
    Error(Errc code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
    Errc code() const noexcept { return code_; }

  private:
    Errc code_;
};

inline const char* errc_name(Errc c) {
    switch (c) {
        case Errc::config: return "config";
        case Errc::missing_file: return "missing_file";
        case Errc::parse: return "parse";
        case Errc::infeasible: return "infeasible";
        case Errc::internal: return "internal";
    }
    return "internal";
}

} // namespace lifi
