// SPDX-License-Identifier: Apache-2.0

#include "lifi/neural/cdrn.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lifi::neural {

void CdrnConfig::validate() const {
    if (blocks < 1) throw std::invalid_argument("CDRN needs at least one denoising block");
    if (layers_per_block < 1) throw std::invalid_argument("CDRN blocks need at least one layer");
    if (filters < 1) throw std::invalid_argument("CDRN filter count must be >= 1");
    if (kernel < 1 || kernel % 2 == 0) throw std::invalid_argument("CDRN kernel must be odd");
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (epochs < 1) throw std::invalid_argument("epoch count must be >= 1");
    if (batch_size < 1) throw std::invalid_argument("batch size must be >= 1");
}

void TrainingPair::validate() const {
    if (ls_prev.size() != ls_next.size() || ls_prev.size() != target.size()) {
        throw std::invalid_argument("training pair vectors differ in length");
    }
    if (ls_prev.size() == 0) throw std::invalid_argument("training pair is empty");
    if (!ls_prev.allFinite() || !ls_next.allFinite() || !target.allFinite()) {
        throw std::invalid_argument("training pair contains non-finite values");
    }
}

CdrnModel::CdrnModel(const CdrnConfig& cfg) : cfg_(cfg) {
    cfg.validate();
    rng::Generator gen(rng::derive_seed(cfg.seed, "cdrn-init"));
    blocks_.reserve(static_cast<std::size_t>(cfg.blocks));
    for (int d = 0; d < cfg.blocks; ++d) {
        Block block;
        const int inner = cfg.layers_per_block - 1;
        for (int l = 0; l < inner; ++l) {
            const int in_ch = l == 0 ? 1 : cfg.filters;
            block.convs.emplace_back(in_ch, cfg.filters, cfg.kernel, gen);
            block.bns.emplace_back(cfg.filters);
        }
        // The residual tail starts at zero so a fresh network is the identity
        // map and training can only improve on the raw LS input.
        const int tail_in = inner == 0 ? 1 : cfg.filters;
        block.convs.emplace_back(tail_in, 1, cfg.kernel, gen, 0.0);
        blocks_.push_back(std::move(block));
    }
}

FeatureMap CdrnModel::block_residual(const Block& block, const FeatureMap& input) const {
    FeatureMap u = input;
    for (std::size_t l = 0; l + 1 < block.convs.size(); ++l) {
        u = relu(block.bns[l].apply(block.convs[l].apply(u)));
    }
    return block.convs.back().apply(u);
}

FeatureMap CdrnModel::apply(const FeatureMap& input) const {
    FeatureMap p = input;
    for (auto& v : p.data) v /= input_scale;
    for (const auto& block : blocks_) {
        const FeatureMap r = block_residual(block, p);
        for (std::size_t i = 0; i < p.data.size(); ++i) p.data[i] -= r.data[i];
    }
    for (auto& v : p.data) v *= input_scale;
    return p;
}

FeatureMap cdrn_forward(const CdrnModel& model, const FeatureMap& input) {
    return model.apply(input);
}

FeatureMap pair_to_map(const Eigen::VectorXd& ls_prev, const Eigen::VectorXd& ls_next) {
    if (ls_prev.size() != ls_next.size()) throw std::invalid_argument("estimate pair lengths differ");
    FeatureMap fm(1, 2, static_cast<int>(ls_prev.size()));
    for (int x = 0; x < fm.cols; ++x) {
        fm.at(0, 0, x) = ls_prev[x];
        fm.at(0, 1, x) = ls_next[x];
    }
    return fm;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> cdrn_denoise(const CdrnModel& model,
                                                         const Eigen::VectorXd& ls_prev,
                                                         const Eigen::VectorXd& ls_next) {
    const FeatureMap out = model.apply(pair_to_map(ls_prev, ls_next));
    Eigen::VectorXd h_prev(out.cols), h_next(out.cols);
    for (int x = 0; x < out.cols; ++x) {
        h_prev[x] = out.at(0, 0, x);
        h_next[x] = out.at(0, 1, x);
    }
    return {h_prev, h_next};
}

namespace {

// Per-block training caches (activations needed by backward passes).
struct BlockCache {
    std::vector<Batch> conv_in;              // input of each conv
    std::vector<BatchNorm2d::Cache> bn;      // cache of each batch norm
    std::vector<Batch> relu_in;              // input of each relu (bn output)
};

Batch block_forward_train(CdrnModel::Block& block, const Batch& input, BlockCache& cache) {
    const std::size_t inner = block.convs.size() - 1;
    cache.conv_in.assign(block.convs.size(), {});
    cache.bn.assign(inner, {});
    cache.relu_in.assign(inner, {});
    Batch u = input;
    for (std::size_t l = 0; l < inner; ++l) {
        cache.conv_in[l] = u;
        Batch c = block.convs[l].apply(u);
        Batch n = block.bns[l].forward_train(c, cache.bn[l]);
        cache.relu_in[l] = n;
        u = relu(n);
    }
    cache.conv_in[inner] = u;
    return block.convs.back().apply(u);
}

struct BlockGrads {
    std::vector<Conv2d::Grad> convs;
    std::vector<BatchNorm2d::Grad> bns;
};

Batch block_backward(const CdrnModel::Block& block, const BlockCache& cache, const Batch& grad_res,
                     BlockGrads& grads) {
    const std::size_t inner = block.convs.size() - 1;
    Batch g = block.convs.back().backward(cache.conv_in[inner], grad_res, grads.convs[inner]);
    for (std::size_t l = inner; l-- > 0;) {
        g = relu_backward(cache.relu_in[l], g);
        g = block.bns[l].backward(cache.bn[l], g, grads.bns[l]);
        g = block.convs[l].backward(cache.conv_in[l], g, grads.convs[l]);
    }
    return g;
}

double pick_power_of_two_scale(const std::vector<TrainingPair>& pairs) {
    double peak = 0.0;
    for (const auto& p : pairs) {
        peak = std::max({peak, p.ls_prev.cwiseAbs().maxCoeff(), p.ls_next.cwiseAbs().maxCoeff(),
                         p.target.cwiseAbs().maxCoeff()});
    }
    if (peak <= 0.0) return 1.0;
    return std::exp2(std::round(std::log2(peak)));
}

} // namespace

CdrnTrainResult cdrn_train(const std::vector<TrainingPair>& pairs, const CdrnConfig& cfg) {
    cfg.validate();
    if (pairs.empty()) throw std::invalid_argument("CDRN training needs at least one pair");
    for (const auto& p : pairs) {
        p.validate();
        if (p.target.squaredNorm() == 0.0) {
            throw std::invalid_argument("CDRN training target is the zero vector");
        }
    }

    CdrnTrainResult result;
    result.model = CdrnModel(cfg);
    CdrnModel& model = result.model;
    model.input_scale = pick_power_of_two_scale(pairs);

    const double scale = model.input_scale;
    std::vector<FeatureMap> inputs;
    std::vector<Eigen::VectorXd> targets;
    std::vector<double> target_norm_sq;
    inputs.reserve(pairs.size());
    targets.reserve(pairs.size());
    for (const auto& p : pairs) {
        FeatureMap fm = pair_to_map(p.ls_prev, p.ls_next);
        for (auto& v : fm.data) v /= scale;
        inputs.push_back(std::move(fm));
        targets.push_back(p.target / scale);
        target_norm_sq.push_back(targets.back().squaredNorm());
    }

    rng::Generator shuffle_gen(rng::derive_seed(cfg.seed, "cdrn-shuffle"));
    std::vector<std::size_t> order(pairs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});

    const auto d_count = static_cast<std::size_t>(cfg.blocks);
    for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
        shuffle_gen.shuffle(order);
        double epoch_loss = 0.0;
        std::size_t batch_count = 0;

        for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(cfg.batch_size)) {
            const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(cfg.batch_size));
            const std::size_t bs = end - begin;

            Batch p_cur;
            p_cur.reserve(bs);
            for (std::size_t i = begin; i < end; ++i) p_cur.push_back(inputs[order[i]]);

            // Forward through the cascade, keeping each block's input and caches.
            std::vector<Batch> block_inputs(d_count);
            std::vector<BlockCache> caches(d_count);
            for (std::size_t d = 0; d < d_count; ++d) {
                block_inputs[d] = p_cur;
                Batch res = block_forward_train(model.blocks_[d], p_cur, caches[d]);
                for (std::size_t s = 0; s < bs; ++s) {
                    for (std::size_t i = 0; i < p_cur[s].data.size(); ++i) {
                        p_cur[s].data[i] -= res[s].data[i];
                    }
                }
            }

            // NMSE loss on the second row (window k+1).
            double loss = 0.0;
            Batch grad(bs);
            for (std::size_t s = 0; s < bs; ++s) {
                const auto idx = order[begin + s];
                const Eigen::VectorXd& y = targets[idx];
                grad[s] = FeatureMap(1, 2, p_cur[s].cols);
                double err = 0.0;
                for (int x = 0; x < p_cur[s].cols; ++x) {
                    const double diff = p_cur[s].at(0, 1, x) - y[x];
                    err += diff * diff;
                    grad[s].at(0, 1, x) =
                        2.0 * diff / (target_norm_sq[idx] * static_cast<double>(bs));
                }
                loss += err / target_norm_sq[idx];
            }
            loss /= static_cast<double>(bs);
            epoch_loss += loss;
            ++batch_count;

            // Backward through the cascade: dL/dP_{d-1} = g + backward(-g).
            std::vector<BlockGrads> grads(d_count);
            for (std::size_t d = 0; d < d_count; ++d) {
                grads[d].convs.reserve(model.blocks_[d].convs.size());
                for (const auto& cv : model.blocks_[d].convs) grads[d].convs.push_back(cv.zero_grad());
                grads[d].bns.reserve(model.blocks_[d].bns.size());
                for (const auto& bn : model.blocks_[d].bns) grads[d].bns.push_back(bn.zero_grad());
            }
            for (std::size_t d = d_count; d-- > 0;) {
                Batch neg = grad;
                for (auto& fm : neg)
                    for (auto& v : fm.data) v = -v;
                Batch gin = block_backward(model.blocks_[d], caches[d], neg, grads[d]);
                for (std::size_t s = 0; s < bs; ++s) {
                    for (std::size_t i = 0; i < grad[s].data.size(); ++i) {
                        grad[s].data[i] += gin[s].data[i];
                    }
                }
            }
            for (std::size_t d = 0; d < d_count; ++d) {
                auto& block = model.blocks_[d];
                for (std::size_t l = 0; l < block.convs.size(); ++l) {
                    block.convs[l].step(grads[d].convs[l], cfg.learning_rate);
                }
                for (std::size_t l = 0; l < block.bns.size(); ++l) {
                    block.bns[l].step(grads[d].bns[l], cfg.learning_rate);
                }
            }
        }

        epoch_loss /= static_cast<double>(batch_count);
        if (!std::isfinite(epoch_loss)) {
            throw std::runtime_error("CDRN training diverged at epoch " + std::to_string(epoch));
        }
        result.loss_history.push_back(epoch_loss);
    }
    return result;
}

std::vector<TrainingPair> build_training_pairs(const channel::ChannelTrace& trace,
                                               const coherence::CoherenceResult& coh,
                                               const estimation::PilotDesign& pilot,
                                               double noise_var, std::uint64_t seed, int led,
                                               int pd) {
    if (trace.gains.empty()) throw std::invalid_argument("channel trace is empty");
    if (coh.outage || coh.n_c == 0) {
        throw std::domain_error("coherence time is zero (outage): cannot segment the trace");
    }
    if (noise_var < 0.0) throw std::invalid_argument("noise variance must be non-negative");
    const auto window = coh.n_c;
    const auto pilot_len = static_cast<std::size_t>(pilot.amplitudes.size());
    if (pilot_len > window) {
        throw std::invalid_argument("pilot length exceeds the coherence window");
    }
    if ((pilot.amplitudes.array() <= 0.0).any()) {
        throw std::invalid_argument("per-slot LS estimates need strictly positive pilot amplitudes");
    }
    if (led < 0 || led >= trace.gains.front().rows() || pd < 0 || pd >= trace.gains.front().cols()) {
        throw std::out_of_range("LED/PD selection out of range");
    }

    const std::size_t windows = trace.gains.size() / window;
    if (windows < 2) {
        throw std::invalid_argument("trace too short: needs at least two coherence windows");
    }

    rng::Generator gen(seed);
    const double sigma = std::sqrt(noise_var);
    std::vector<Eigen::VectorXd> truth(windows), ls(windows);
    for (std::size_t k = 0; k < windows; ++k) {
        truth[k].resize(static_cast<Eigen::Index>(pilot_len));
        ls[k].resize(static_cast<Eigen::Index>(pilot_len));
        for (std::size_t l = 0; l < pilot_len; ++l) {
            const double h = trace.gains[k * window + l](led, pd);
            const double a = pilot.amplitudes[static_cast<Eigen::Index>(l)];
            const double y = h * a + sigma * gen.normal();
            truth[k][static_cast<Eigen::Index>(l)] = h;
            ls[k][static_cast<Eigen::Index>(l)] = y / a;
        }
    }

    std::vector<TrainingPair> pairs;
    pairs.reserve(windows - 1);
    for (std::size_t k = 0; k + 1 < windows; ++k) {
        TrainingPair p;
        p.ls_prev = ls[k];
        p.ls_next = ls[k + 1];
        p.target = truth[k + 1];
        pairs.push_back(std::move(p));
    }
    return pairs;
}

} // namespace lifi::neural
