// SPDX-License-Identifier: Apache-2.0

#include "lifi/neural/lstm.hpp"

#include <cmath>

namespace lifi::neural {

namespace {

GateWeights init_gate(int hidden, rng::Generator& gen) {
    const double r = 1.0 / std::sqrt(static_cast<double>(hidden));
    GateWeights g;
    g.w_in.resize(hidden);
    g.w_rec.resize(hidden, hidden);
    g.b = Eigen::VectorXd::Zero(hidden);
    for (int i = 0; i < hidden; ++i) g.w_in[i] = r * (2.0 * gen.uniform01() - 1.0);
    for (int i = 0; i < hidden; ++i)
        for (int j = 0; j < hidden; ++j) g.w_rec(i, j) = r * (2.0 * gen.uniform01() - 1.0);
    return g;
}

// Gate pre-activation; the shared variant applies the recurrent matrix to the
// broadcast input plus the previous hidden state, as the cell equations read
// literally.
Eigen::VectorXd gate_pre(const GateWeights& g, double x, const Eigen::VectorXd& s_prev,
                         bool shared) {
    if (shared) {
        return g.w_rec * (Eigen::VectorXd::Constant(s_prev.size(), x) + s_prev) + g.b;
    }
    return g.w_in * x + g.w_rec * s_prev + g.b;
}

Eigen::VectorXd sigmoid_vec(const Eigen::VectorXd& v) {
    return v.unaryExpr([](double x) { return sigmoid(x); });
}

Eigen::VectorXd tanh_vec(const Eigen::VectorXd& v) {
    return v.unaryExpr([](double x) { return std::tanh(x); });
}

void accumulate_gate(GateGrad& grad, const GateWeights& weights, const Eigen::VectorXd& dz,
                     double x, const Eigen::VectorXd& s_prev, bool shared,
                     Eigen::VectorXd& grad_s_prev, double& grad_x) {
    if (shared) {
        const Eigen::VectorXd combo = Eigen::VectorXd::Constant(s_prev.size(), x) + s_prev;
        grad.w_rec += dz * combo.transpose();
        grad.b += dz;
        const Eigen::VectorXd back = weights.w_rec.transpose() * dz;
        grad_s_prev += back;
        grad_x += back.sum();
    } else {
        grad.w_in += dz * x;
        grad.w_rec += dz * s_prev.transpose();
        grad.b += dz;
        grad_s_prev += weights.w_rec.transpose() * dz;
        grad_x += weights.w_in.dot(dz);
    }
}

} // namespace

LstmParams LstmParams::init(int hidden, rng::Generator& gen, bool shared) {
    if (hidden < 1) throw std::invalid_argument("LSTM hidden size must be >= 1");
    LstmParams p;
    p.hidden = hidden;
    p.shared_gate_weights = shared;
    p.forget = init_gate(hidden, gen);
    p.cell = init_gate(hidden, gen);
    p.input = init_gate(hidden, gen);
    p.output = init_gate(hidden, gen);
    return p;
}

LstmState LstmState::zero(int hidden) {
    return LstmState{Eigen::VectorXd::Zero(hidden), Eigen::VectorXd::Zero(hidden)};
}

LstmCellOutput lstm_cell(double input, const LstmState& prev, const LstmParams& params) {
    LstmCellCache cache;
    LstmState next = lstm_forward_step(params, input, prev, cache);
    return LstmCellOutput{next.s, std::move(next)};
}

LstmState lstm_forward_step(const LstmParams& params, double input, const LstmState& prev,
                            LstmCellCache& cache) {
    if (prev.c.size() != params.hidden || prev.s.size() != params.hidden) {
        throw std::invalid_argument("LSTM state size does not match the hidden size");
    }
    cache.x = input;
    cache.s_prev = prev.s;
    cache.c_prev = prev.c;
    const bool sh = params.shared_gate_weights;
    cache.f = sigmoid_vec(gate_pre(params.forget, input, prev.s, sh));
    cache.ctilde = tanh_vec(gate_pre(params.cell, input, prev.s, sh));
    cache.i = sigmoid_vec(gate_pre(params.input, input, prev.s, sh));
    cache.c = cache.ctilde.cwiseProduct(cache.i) + prev.c.cwiseProduct(cache.f);
    cache.o = sigmoid_vec(gate_pre(params.output, input, prev.s, sh));
    cache.tanh_c = tanh_vec(cache.c);
    cache.s = cache.tanh_c.cwiseProduct(cache.o);
    return LstmState{cache.c, cache.s};
}

LstmGrad LstmGrad::zero(const LstmParams& p) {
    auto zero_gate = [&](void) {
        GateGrad g;
        g.w_in = Eigen::VectorXd::Zero(p.hidden);
        g.w_rec = Eigen::MatrixXd::Zero(p.hidden, p.hidden);
        g.b = Eigen::VectorXd::Zero(p.hidden);
        return g;
    };
    return LstmGrad{zero_gate(), zero_gate(), zero_gate(), zero_gate()};
}

LstmStepBackResult lstm_backward_step(const LstmParams& params, const LstmCellCache& cache,
                                      const Eigen::VectorXd& grad_s, const Eigen::VectorXd& grad_c,
                                      LstmGrad& grad) {
    const Eigen::VectorXd d_o = grad_s.cwiseProduct(cache.tanh_c);
    const Eigen::VectorXd one_minus_tanh2 =
        cache.tanh_c.unaryExpr([](double v) { return 1.0 - v * v; });
    const Eigen::VectorXd d_c = grad_c + grad_s.cwiseProduct(cache.o).cwiseProduct(one_minus_tanh2);

    const Eigen::VectorXd d_f = d_c.cwiseProduct(cache.c_prev);
    const Eigen::VectorXd d_i = d_c.cwiseProduct(cache.ctilde);
    const Eigen::VectorXd d_ctilde = d_c.cwiseProduct(cache.i);

    auto sig_back = [](const Eigen::VectorXd& dg, const Eigen::VectorXd& g) {
        return dg.cwiseProduct(g).cwiseProduct(Eigen::VectorXd::Ones(g.size()) - g);
    };
    const Eigen::VectorXd dz_f = sig_back(d_f, cache.f);
    const Eigen::VectorXd dz_i = sig_back(d_i, cache.i);
    const Eigen::VectorXd dz_o = sig_back(d_o, cache.o);
    const Eigen::VectorXd dz_c =
        d_ctilde.cwiseProduct(cache.ctilde.unaryExpr([](double v) { return 1.0 - v * v; }));

    LstmStepBackResult res;
    res.grad_s_prev = Eigen::VectorXd::Zero(params.hidden);
    res.grad_c_prev = d_c.cwiseProduct(cache.f);
    res.grad_x = 0.0;

    const bool sh = params.shared_gate_weights;
    accumulate_gate(grad.forget, params.forget, dz_f, cache.x, cache.s_prev, sh, res.grad_s_prev,
                    res.grad_x);
    accumulate_gate(grad.input, params.input, dz_i, cache.x, cache.s_prev, sh, res.grad_s_prev,
                    res.grad_x);
    accumulate_gate(grad.output, params.output, dz_o, cache.x, cache.s_prev, sh, res.grad_s_prev,
                    res.grad_x);
    accumulate_gate(grad.cell, params.cell, dz_c, cache.x, cache.s_prev, sh, res.grad_s_prev,
                    res.grad_x);
    return res;
}

void lstm_step_params(LstmParams& params, const LstmGrad& grad, double lr) {
    auto step_gate = [lr](GateWeights& w, const GateGrad& g) {
        w.w_in -= lr * g.w_in;
        w.w_rec -= lr * g.w_rec;
        w.b -= lr * g.b;
    };
    step_gate(params.forget, grad.forget);
    step_gate(params.cell, grad.cell);
    step_gate(params.input, grad.input);
    step_gate(params.output, grad.output);
}

RnnParams RnnParams::init(int hidden, rng::Generator& gen) {
    if (hidden < 1) throw std::invalid_argument("RNN hidden size must be >= 1");
    RnnParams p;
    p.hidden = hidden;
    p.cell = init_gate(hidden, gen);
    return p;
}

Eigen::VectorXd rnn_cell(double input, const Eigen::VectorXd& prev_state, const RnnParams& params) {
    RnnCellCache cache;
    return rnn_forward_step(params, input, prev_state, cache);
}

Eigen::VectorXd rnn_forward_step(const RnnParams& params, double input,
                                 const Eigen::VectorXd& prev_state, RnnCellCache& cache) {
    if (prev_state.size() != params.hidden) {
        throw std::invalid_argument("RNN state size does not match the hidden size");
    }
    cache.x = input;
    cache.s_prev = prev_state;
    cache.s = tanh_vec(gate_pre(params.cell, input, prev_state, false));
    return cache.s;
}

RnnStepBackResult rnn_backward_step(const RnnParams& params, const RnnCellCache& cache,
                                    const Eigen::VectorXd& grad_s, GateGrad& grad) {
    const Eigen::VectorXd dz =
        grad_s.cwiseProduct(cache.s.unaryExpr([](double v) { return 1.0 - v * v; }));
    RnnStepBackResult res;
    res.grad_s_prev = Eigen::VectorXd::Zero(params.hidden);
    res.grad_x = 0.0;
    accumulate_gate(grad, params.cell, dz, cache.x, cache.s_prev, false, res.grad_s_prev,
                    res.grad_x);
    return res;
}

void rnn_step_params(RnnParams& params, const GateGrad& grad, double lr) {
    params.cell.w_in -= lr * grad.w_in;
    params.cell.w_rec -= lr * grad.w_rec;
    params.cell.b -= lr * grad.b;
}

} // namespace lifi::neural
