// SPDX-License-Identifier: Apache-2.0

#include "lifi/neural/tracker.hpp"

#include <cmath>
#include <numeric>

#include "lifi/neural/metrics.hpp"

namespace lifi::neural {

void TrackerConfig::validate() const {
    if (hidden < 1) throw std::invalid_argument("tracker hidden size must be >= 1");
    if (window < 1) throw std::invalid_argument("tracker window must be >= 1");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (iterations < 1) throw std::invalid_argument("iteration count must be >= 1");
    if (!(train_fraction > 0.0) || !(train_fraction < 1.0)) {
        throw std::invalid_argument("train fraction must lie in (0, 1)");
    }
    if (!(norm_hi > norm_lo)) throw std::invalid_argument("normalization bounds are inverted");
}

double TrackerModel::normalize(double v) const {
    const double range = data_max - data_min;
    const double scale = range > 0.0 ? (cfg.norm_hi - cfg.norm_lo) / range : 1.0;
    return cfg.norm_lo + (v - data_min) * scale;
}

double TrackerModel::denormalize(double v) const {
    const double range = data_max - data_min;
    const double scale = range > 0.0 ? (cfg.norm_hi - cfg.norm_lo) / range : 1.0;
    return data_min + (v - cfg.norm_lo) / scale;
}

double TrackerModel::predict_normalized(std::span<const double> window_values) const {
    if (static_cast<int>(window_values.size()) != cfg.window) {
        throw std::invalid_argument("prediction window size mismatch");
    }
    if (kind == TrackerKind::lstm) {
        LstmState state = LstmState::zero(cfg.hidden);
        LstmCellCache cache;
        for (double v : window_values) state = lstm_forward_step(lstm, v, state, cache);
        return readout.apply(state.s)[0];
    }
    Eigen::VectorXd s = Eigen::VectorXd::Zero(cfg.hidden);
    RnnCellCache cache;
    for (double v : window_values) s = rnn_forward_step(rnn, v, s, cache);
    return readout.apply(s)[0];
}

double TrackerModel::predict(std::span<const double> window_values) const {
    std::vector<double> norm(window_values.size());
    for (std::size_t i = 0; i < window_values.size(); ++i) norm[i] = normalize(window_values[i]);
    return denormalize(predict_normalized(norm));
}

TrackResult track_channel(std::span<const double> gains, const TrackerConfig& cfg,
                          TrackerKind kind) {
    cfg.validate();
    const std::size_t n = gains.size();
    const auto window = static_cast<std::size_t>(cfg.window);
    if (n <= window + 1) {
        throw std::invalid_argument("trace length must exceed time step + 1");
    }

    auto train_len = static_cast<std::size_t>(std::floor(cfg.train_fraction * static_cast<double>(n)));
    if (train_len <= window) {
        throw std::invalid_argument("training split too short for one prediction window");
    }
    if (train_len >= n) train_len = n - 1;

    TrackResult result;
    TrackerModel& model = result.model;
    model.kind = kind;
    model.cfg = cfg;

    // Min-max bounds from the training split only; the test split reuses them.
    model.data_min = gains[0];
    model.data_max = gains[0];
    for (std::size_t i = 0; i < train_len; ++i) {
        model.data_min = std::min(model.data_min, gains[i]);
        model.data_max = std::max(model.data_max, gains[i]);
    }

    std::vector<double> norm(n);
    for (std::size_t i = 0; i < n; ++i) norm[i] = model.normalize(gains[i]);

    rng::Generator gen(rng::derive_seed(cfg.seed, "tracker-init"));
    if (kind == TrackerKind::lstm) {
        model.lstm = LstmParams::init(cfg.hidden, gen, cfg.shared_gate_weights);
    } else {
        model.rnn = RnnParams::init(cfg.hidden, gen);
    }
    model.readout = Dense(cfg.hidden, 1, gen);

    // Training windows: inputs [i, i + window), target i + window, fully
    // inside the training split.
    std::vector<std::size_t> starts;
    for (std::size_t i = 0; i + window < train_len; ++i) starts.push_back(i);

    rng::Generator shuffle_gen(rng::derive_seed(cfg.seed, "tracker-shuffle"));
    std::vector<LstmCellCache> lstm_caches(window);
    std::vector<RnnCellCache> rnn_caches(window);

    for (int epoch = 0; epoch < cfg.iterations; ++epoch) {
        shuffle_gen.shuffle(starts);
        double epoch_loss = 0.0;
        for (const std::size_t start : starts) {
            const double target = norm[start + window];
            double pred = 0.0;

            if (kind == TrackerKind::lstm) {
                LstmState state = LstmState::zero(cfg.hidden);
                for (std::size_t t = 0; t < window; ++t) {
                    state = lstm_forward_step(model.lstm, norm[start + t], state, lstm_caches[t]);
                }
                pred = model.readout.apply(state.s)[0];
                const double err = pred - target;
                epoch_loss += err * err;

                Dense::Grad readout_grad = model.readout.zero_grad();
                LstmGrad lstm_grad = LstmGrad::zero(model.lstm);
                Eigen::VectorXd grad_s = model.readout.backward(
                    state.s, Eigen::VectorXd::Constant(1, 2.0 * err), readout_grad);
                Eigen::VectorXd grad_c = Eigen::VectorXd::Zero(cfg.hidden);
                for (std::size_t t = window; t-- > 0;) {
                    const auto back = lstm_backward_step(model.lstm, lstm_caches[t], grad_s,
                                                         grad_c, lstm_grad);
                    grad_s = back.grad_s_prev;
                    grad_c = back.grad_c_prev;
                }
                lstm_step_params(model.lstm, lstm_grad, cfg.learning_rate);
                model.readout.step(readout_grad, cfg.learning_rate);
            } else {
                Eigen::VectorXd s = Eigen::VectorXd::Zero(cfg.hidden);
                for (std::size_t t = 0; t < window; ++t) {
                    s = rnn_forward_step(model.rnn, norm[start + t], s, rnn_caches[t]);
                }
                pred = model.readout.apply(s)[0];
                const double err = pred - target;
                epoch_loss += err * err;

                Dense::Grad readout_grad = model.readout.zero_grad();
                GateGrad rnn_grad{Eigen::VectorXd::Zero(cfg.hidden),
                                  Eigen::MatrixXd::Zero(cfg.hidden, cfg.hidden),
                                  Eigen::VectorXd::Zero(cfg.hidden)};
                Eigen::VectorXd grad_s = model.readout.backward(
                    s, Eigen::VectorXd::Constant(1, 2.0 * err), readout_grad);
                for (std::size_t t = window; t-- > 0;) {
                    const auto back = rnn_backward_step(model.rnn, rnn_caches[t], grad_s, rnn_grad);
                    grad_s = back.grad_s_prev;
                }
                rnn_step_params(model.rnn, rnn_grad, cfg.learning_rate);
                model.readout.step(readout_grad, cfg.learning_rate);
            }
        }
        epoch_loss /= static_cast<double>(starts.size());
        if (!std::isfinite(epoch_loss)) {
            throw std::runtime_error("tracker training diverged at epoch " + std::to_string(epoch));
        }
        result.loss_history.push_back(epoch_loss);
    }

    // One-step-ahead prediction over the test region using measured history.
    double delta_sum = 0.0;
    std::size_t delta_count = 0;
    for (std::size_t slot = train_len; slot < n; ++slot) {
        const std::span<const double> past = norm;
        const double pred_norm =
            model.predict_normalized(past.subspan(slot - window, window));
        const double pred = model.denormalize(pred_norm);
        result.slots.push_back(slot);
        result.h_true.push_back(gains[slot]);
        result.h_pred.push_back(pred);
        if (gains[slot] == 0.0) {
            result.gap.push_back(true);
            result.delta_h.push_back(0.0);
        } else {
            result.gap.push_back(false);
            const double d = delta_h(pred, gains[slot]);
            result.delta_h.push_back(d);
            delta_sum += d;
            ++delta_count;
        }
    }
    result.mean_delta_h = delta_count > 0 ? delta_sum / static_cast<double>(delta_count) : 0.0;
    return result;
}

} // namespace lifi::neural
