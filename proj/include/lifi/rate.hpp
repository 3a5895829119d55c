// SPDX-License-Identifier: Apache-2.0
//
// M-PAM achievable data rates for SISO/SIMO/MISO/MIMO links, estimated by
// Monte Carlo evaluation of the expectation over the Gaussian noise.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lifi/channel.hpp"
#include "lifi/common.hpp"

namespace lifi::rate {

// Discrete non-negative intensity constellation under instantaneous optical,
// average optical, and electrical power caps.
struct Constellation {
    std::vector<double> points; // s_k, ascending
    std::vector<double> probs;  // p_k
    double peak_optical{0.0};   // instantaneous cap
    double avg_optical{0.0};    // average cap
    double electrical{0.0};     // second-moment cap

    void validate() const;
};

// Equiprobable M-PAM on [0, peak]: s_k = (k-1) * peak / (M-1).
Constellation pam_uniform(int levels, double peak_optical, double avg_optical, double electrical);

struct RateConfig {
    double bandwidth{20e6};     // B, Hz
    double noise_var{1e-12};    // sigma^2
    std::size_t mc_samples{100000};
    std::uint64_t seed{0};

    void validate() const;
};

struct RateEstimate {
    double bits_per_s{0.0};         // raw Monte Carlo estimate
    double clamped_bits_per_s{0.0}; // max(raw, 0)
    double std_error{0.0};          // Monte Carlo standard error, bits/s
};

RateEstimate rate_siso(double gain, const Constellation& c, const RateConfig& rc);

// SIMO/MISO/MIMO collapse to SISO at the scalar effective gain (the rate is
// even in the gain sign, so the magnitude is used).
RateEstimate rate_simo(const Eigen::VectorXd& gains, const Eigen::VectorXd& rx_combiner,
                       const Constellation& c, const RateConfig& rc);
RateEstimate rate_miso(const Eigen::VectorXd& gains, const Eigen::VectorXd& tx_weights,
                       const Constellation& c, const RateConfig& rc);
RateEstimate rate_mimo(const Eigen::MatrixXd& gains, const Eigen::VectorXd& tx_weights,
                       const Eigen::VectorXd& rx_combiner, const Constellation& c,
                       const RateConfig& rc);

enum class BeamformerPolicy { mrc, dominant_singular, uniform };

struct Beamformers {
    Eigen::VectorXd rx; // omega, length N
    Eigen::VectorXd tx; // q, length K
    BeamformerPolicy policy{BeamformerPolicy::uniform};
    bool zero_gain_warning{false};
};

// Unit-norm transmit/receive weights for a non-negative K x N gain matrix.
Beamformers choose_beamformers(const Eigen::MatrixXd& gains, BeamformerPolicy policy);

double effective_gain(const Eigen::MatrixXd& gains, const Beamformers& bf);

enum class Topology { siso, simo, miso, mimo };

struct TraceRateOptions {
    Topology topology{Topology::siso};
    std::vector<int> led_indices{0};
    std::vector<int> pd_indices{0};
    BeamformerPolicy policy{BeamformerPolicy::mrc};
};

struct TraceRatePoint {
    double t{0.0};
    RateEstimate rate;
};

// Per-slot rate along a channel trace, with per-slot beamformers. The same
// noise stream is reused at every slot, so identical gain matrices produce
// identical estimates.
std::vector<TraceRatePoint> rate_along_trace(const channel::ChannelTrace& trace,
                                             const TraceRateOptions& opts, const Constellation& c,
                                             const RateConfig& rc);

} // namespace lifi::rate
