// SPDX-License-Identifier: Apache-2.0
//
// Channel timing statistics: autocorrelation, the normalized coefficient
// rho_L, threshold-based coherence time, and empirical CDFs.

#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "lifi/common.hpp"

namespace lifi::coherence {

enum class OutagePolicy { zero_if_any_outage, ignore_outage };

struct CoherenceConfig {
    double eta_th{0.99};
    std::size_t max_lag{1000};
    OutagePolicy outage_policy{OutagePolicy::zero_if_any_outage};
    // When set, rho is evaluated at every lag up to max_lag even after the
    // threshold crossing (for plot emission); otherwise evaluation stops at
    // the crossing.
    bool full_curve{false};

    void validate() const;
};

struct CoherenceResult {
    std::vector<double> rho; // rho_L for L = 0..last evaluated lag
    std::size_t n_c{0};      // first lag with rho <= eta_th (0 on outage)
    double coherence_time{0.0}; // T_c = n_c / f_s
    bool outage{false};
    bool censored{false}; // no crossing within max_lag; T_c reported at the cap
};

// Sample autocovariance at the given lag, using the full-sequence mean and
// averaging over the (len - lag) available pairs.
double autocorrelation(std::span<const double> h, std::size_t lag);

// Normalized autocorrelation coefficient rho_L = C(L) / C(0).
double rho(std::span<const double> h, std::size_t lag);

// First lag where rho_L drops to or below eta_th, in slots and seconds.
// A sequence containing an exact-zero gain counts as outage under the default
// policy and reports T_c = 0.
CoherenceResult coherence_time(std::span<const double> h, double sample_rate,
                               const CoherenceConfig& cfg);

// Right-continuous empirical CDF as sorted (value, probability) steps; the
// final probability is exactly 1.
std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> values);

} // namespace lifi::coherence
