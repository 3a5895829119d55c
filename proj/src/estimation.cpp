// SPDX-License-Identifier: Apache-2.0

#include "lifi/estimation.hpp"

#include <cmath>

namespace lifi::estimation {

void PilotConstraints::validate() const {
    if (!(peak > 0.0)) throw std::invalid_argument("pilot peak power must be positive");
    if (!(average > 0.0)) throw std::invalid_argument("pilot average power must be positive");
    if (average > peak) {
        throw Error(Errc::infeasible, "pilot average power exceeds the per-slot peak");
    }
    if (length < 1) throw std::invalid_argument("pilot length must be at least 1");
}

double ls_estimate(const Eigen::VectorXd& received, const Eigen::VectorXd& pilots) {
    if (received.size() != pilots.size()) {
        throw std::invalid_argument("received and pilot vectors differ in length");
    }
    const double energy = pilots.squaredNorm();
    if (energy == 0.0) throw std::domain_error("pilot sequence has zero energy");
    return pilots.dot(received) / energy;
}

namespace {

PilotDesign finalize(Eigen::VectorXd a) {
    PilotDesign d;
    const double energy = a.squaredNorm();
    d.amplitudes = std::move(a);
    d.decoder = d.amplitudes / energy;
    d.noise_var_factor = 1.0 / energy;
    return d;
}

} // namespace

PilotDesign design_pilot(const PilotConstraints& c) {
    c.validate();
    const auto l = static_cast<Eigen::Index>(c.length);
    const double total = c.average * static_cast<double>(c.length);

    // ||a||^2 is maximized at an extreme point of the box-plus-mean polytope:
    // at most one slot sits strictly between 0 and the peak.
    auto full = static_cast<Eigen::Index>(std::floor(total / c.peak + 1e-12));
    double remainder = total - static_cast<double>(full) * c.peak;
    if (remainder < 1e-12 * std::max(1.0, c.peak)) remainder = 0.0;
    if (remainder > c.peak * (1.0 - 1e-12)) { // guard against floor() rounding
        ++full;
        remainder = 0.0;
    }

    Eigen::VectorXd a = Eigen::VectorXd::Zero(l);
    for (Eigen::Index i = 0; i < full; ++i) a[i] = c.peak;
    if (remainder > 0.0 && full < l) a[full] = remainder;
    return finalize(std::move(a));
}

PilotDesign uniform_pilot(const PilotConstraints& c) {
    c.validate();
    return finalize(Eigen::VectorXd::Constant(static_cast<Eigen::Index>(c.length), c.average));
}

double zf_estimate(const Eigen::VectorXd& received, const PilotDesign& design) {
    if (received.size() != design.decoder.size()) {
        throw std::invalid_argument("received vector and decoder differ in length");
    }
    return design.decoder.dot(received);
}

double pilot_grid_oracle(const PilotConstraints& c, double grid_step) {
    c.validate();
    if (c.length > 6) throw std::invalid_argument("grid oracle is limited to pilot lengths <= 6");
    if (!(grid_step > 0.0)) throw std::invalid_argument("grid step must be positive");

    const auto peak_units = static_cast<long>(std::floor(c.peak / grid_step + 1e-9));
    const double total = c.average * static_cast<double>(c.length);
    const auto target_units = static_cast<long>(std::llround(total / grid_step));
    if (std::abs(static_cast<double>(target_units) * grid_step - total) >
        1e-9 * std::max(1.0, total)) {
        throw Error(Errc::infeasible, "no grid point meets the mean constraint within tolerance");
    }
    if (target_units > peak_units * static_cast<long>(c.length)) {
        throw Error(Errc::infeasible, "grid cannot reach the required average power");
    }

    // Enumerate compositions of target_units into `length` parts, each at most
    // peak_units, tracking the best squared norm.
    double best = -1.0;
    std::vector<long> units(c.length, 0);
    auto recurse = [&](auto&& self, std::size_t slot, long left, double norm_sq) -> void {
        if (slot + 1 == c.length) {
            if (left <= peak_units) {
                const double v = static_cast<double>(left) * grid_step;
                best = std::max(best, norm_sq + v * v);
            }
            return;
        }
        const long slots_after = static_cast<long>(c.length - slot - 1);
        const long lo = std::max<long>(0, left - slots_after * peak_units);
        const long hi = std::min<long>(peak_units, left);
        for (long u = hi; u >= lo; --u) {
            const double v = static_cast<double>(u) * grid_step;
            self(self, slot + 1, left - u, norm_sq + v * v);
        }
    };
    if (c.length == 1) {
        const double v = static_cast<double>(target_units) * grid_step;
        best = v * v;
    } else {
        recurse(recurse, 0, target_units, 0.0);
    }
    if (best < 0.0) {
        throw Error(Errc::infeasible, "no grid point meets the mean constraint within tolerance");
    }
    return best;
}

std::string scheme_name(Scheme s) {
    switch (s) {
        case Scheme::ls: return "ls";
        case Scheme::zf_coding: return "zf_coding";
        case Scheme::cdrn: return "cdrn";
    }
    return "ls";
}

} // namespace lifi::estimation
