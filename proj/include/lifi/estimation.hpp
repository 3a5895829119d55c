// SPDX-License-Identifier: Apache-2.0
//
// Pilot-based channel estimation: least squares, zero-forcing linear decoding,
// and optimal pilot design under per-slot and average optical power limits.

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lifi/common.hpp"

namespace lifi::estimation {

struct PilotConstraints {
    double peak{1.0};    // maximum optical power per slot
    double average{0.5}; // required average optical power (equality constraint)
    std::size_t length{16};

    void validate() const; // 0 < average <= peak, length >= 1
};

struct PilotDesign {
    Eigen::VectorXd amplitudes;   // a
    Eigen::VectorXd decoder;      // w, with w . a = 1
    double noise_var_factor{0.0}; // 1 / ||a||^2
};

// Least-squares fit of y = h s: (s . y) / (s . s).
double ls_estimate(const Eigen::VectorXd& received, const Eigen::VectorXd& pilots);

// Noise-variance-minimizing pilot: the feasible set's extreme point with
// floor(L * avg / peak) slots at the peak, one slot carrying the remainder,
// the rest dark; high-power slots first. Decoder is the pilot pseudo-inverse.
PilotDesign design_pilot(const PilotConstraints& c);

// Flat pilot at the average power (baseline for variance comparisons).
PilotDesign uniform_pilot(const PilotConstraints& c);

// Zero-forcing estimate sum_n w[n] y[n]; unbiased with noise variance
// sigma^2 / ||a||^2.
double zf_estimate(const Eigen::VectorXd& received, const PilotDesign& design);

// Exhaustive search over the step-discretized feasible set; returns the best
// ||a||^2 found. Brute-force verifier for design_pilot, practical for L <= 6.
double pilot_grid_oracle(const PilotConstraints& c, double grid_step);

enum class Scheme { ls, zf_coding, cdrn };

std::string scheme_name(Scheme s);

struct EstimatorReport {
    Scheme scheme{Scheme::ls};
    std::vector<double> h_true;
    std::vector<double> h_hat;
    std::vector<double> delta_h; // |h - h_hat| / h per trial
    double nmse{0.0};
};

} // namespace lifi::estimation
