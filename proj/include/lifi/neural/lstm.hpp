// SPDX-License-Identifier: Apache-2.0
//
// LSTM cell with forget/input/output gating over a scalar channel input,
// plus a plain tanh recurrent cell used as the tracking baseline.

#pragma once

#include <cstdint>

#include <Eigen/Dense>

#include "lifi/neural/layers.hpp"
#include "lifi/rng.hpp"

namespace lifi::neural {

// One gate: an input weight column for the scalar h[n], a recurrent matrix
// for the previous hidden state, and a bias.
struct GateWeights {
    Eigen::VectorXd w_in;  // hidden x 1
    Eigen::MatrixXd w_rec; // hidden x hidden
    Eigen::VectorXd b;     // hidden
};

struct LstmParams {
    GateWeights forget, cell, input, output;
    int hidden{0};
    // Literal single-weight reading of the cell equations: one matrix per
    // gate applied to the broadcast input plus the previous hidden state.
    bool shared_gate_weights{false};

    static LstmParams init(int hidden, rng::Generator& gen, bool shared = false);
};

struct LstmState {
    Eigen::VectorXd c; // cell state C_n
    Eigen::VectorXd s; // hidden state (the cell output)

    static LstmState zero(int hidden);
};

struct LstmCellOutput {
    Eigen::VectorXd output; // tanh(C_n) (x) o_n
    LstmState state;
};

// Gate evaluation per the cell equations: f/i/o sigmoid gates, tanh candidate,
// C_n = C~ (x) i + C_{n-1} (x) f, output = tanh(C_n) (x) o.
LstmCellOutput lstm_cell(double input, const LstmState& prev, const LstmParams& params);

// Training caches and gradients (backpropagation through time support).
struct LstmCellCache {
    double x{0.0};
    Eigen::VectorXd s_prev, c_prev;
    Eigen::VectorXd f, i, o, ctilde, c, tanh_c, s;
};

struct GateGrad {
    Eigen::VectorXd w_in;
    Eigen::MatrixXd w_rec;
    Eigen::VectorXd b;
};

struct LstmGrad {
    GateGrad forget, cell, input, output;
    static LstmGrad zero(const LstmParams& p);
};

LstmState lstm_forward_step(const LstmParams& params, double input, const LstmState& prev,
                            LstmCellCache& cache);

struct LstmStepBackResult {
    Eigen::VectorXd grad_s_prev;
    Eigen::VectorXd grad_c_prev;
    double grad_x{0.0};
};

// grad_s: dL/d s_n (includes recurrent contribution); grad_c: dL/d C_n carried
// from the following step.
LstmStepBackResult lstm_backward_step(const LstmParams& params, const LstmCellCache& cache,
                                      const Eigen::VectorXd& grad_s, const Eigen::VectorXd& grad_c,
                                      LstmGrad& grad);

void lstm_step_params(LstmParams& params, const LstmGrad& grad, double lr);

// Baseline: s_n = tanh(W_in x + W_rec s_{n-1} + b).
struct RnnParams {
    GateWeights cell;
    int hidden{0};

    static RnnParams init(int hidden, rng::Generator& gen);
};

struct RnnCellCache {
    double x{0.0};
    Eigen::VectorXd s_prev, s;
};

Eigen::VectorXd rnn_cell(double input, const Eigen::VectorXd& prev_state, const RnnParams& params);

Eigen::VectorXd rnn_forward_step(const RnnParams& params, double input,
                                 const Eigen::VectorXd& prev_state, RnnCellCache& cache);

struct RnnStepBackResult {
    Eigen::VectorXd grad_s_prev;
    double grad_x{0.0};
};

RnnStepBackResult rnn_backward_step(const RnnParams& params, const RnnCellCache& cache,
                                    const Eigen::VectorXd& grad_s, GateGrad& grad);

void rnn_step_params(RnnParams& params, const GateGrad& grad, double lr);

} // namespace lifi::neural
