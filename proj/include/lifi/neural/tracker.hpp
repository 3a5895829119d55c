// SPDX-License-Identifier: Apache-2.0
//
// One-step-ahead channel tracking: windowed LSTM (or plain RNN) over a
// min-max-normalized scalar gain sequence, trained online on the leading
// split and evaluated on the remainder.

#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "lifi/neural/lstm.hpp"

namespace lifi::neural {

struct TrackerConfig {
    int hidden{100};
    int window{4}; // time step: number of past slots fed per prediction
    double learning_rate{0.01};
    int iterations{150}; // training epochs over the window set
    double train_fraction{0.7};
    double norm_lo{0.0};
    double norm_hi{1.0};
    std::uint64_t seed{0};
    bool shared_gate_weights{false};

    void validate() const;
};

enum class TrackerKind { lstm, rnn };

struct TrackerModel {
    TrackerKind kind{TrackerKind::lstm};
    TrackerConfig cfg;
    LstmParams lstm;
    RnnParams rnn;
    Dense readout;
    // Normalization bounds fitted on the training split.
    double data_min{0.0};
    double data_max{1.0};

    double normalize(double v) const;
    double denormalize(double v) const;

    // Normalized-space one-step prediction from a window of normalized values.
    double predict_normalized(std::span<const double> window_values) const;
    // Raw-space prediction from raw past values.
    double predict(std::span<const double> window_values) const;
};

struct TrackResult {
    TrackerModel model;
    std::vector<std::size_t> slots; // absolute indices of predicted slots
    std::vector<double> h_true;
    std::vector<double> h_pred;
    std::vector<double> delta_h; // |h - h_hat| / h; 0 placeholder on gaps
    std::vector<bool> gap;       // true where h == 0 (delta_h undefined)
    std::vector<double> loss_history;
    double mean_delta_h{0.0}; // over non-gap slots
};

// Trains on the leading train_fraction of the trace and predicts one step
// ahead across the remaining slots using the measured history.
TrackResult track_channel(std::span<const double> gains, const TrackerConfig& cfg,
                          TrackerKind kind);

} // namespace lifi::neural
