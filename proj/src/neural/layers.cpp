// SPDX-License-Identifier: Apache-2.0

#include "lifi/neural/layers.hpp"

#include <cmath>

namespace lifi::neural {

Conv2d::Conv2d(int in_channels, int out_channels, int kernel, rng::Generator& gen,
               double init_scale)
    : in_ch_(in_channels), out_ch_(out_channels), kernel_(kernel) {
    if (in_channels < 1 || out_channels < 1) throw std::invalid_argument("conv channel counts must be >= 1");
    if (kernel < 1 || kernel % 2 == 0) throw std::invalid_argument("conv kernel must be odd and >= 1");
    const std::size_t n = static_cast<std::size_t>(out_ch_) * static_cast<std::size_t>(in_ch_) *
                          static_cast<std::size_t>(kernel_) * static_cast<std::size_t>(kernel_);
    w.resize(n);
    b.assign(static_cast<std::size_t>(out_ch_), 0.0);
    const double fan_in = static_cast<double>(in_ch_) * kernel_ * kernel_;
    const double stddev = init_scale * std::sqrt(2.0 / fan_in);
    for (auto& v : w) v = stddev == 0.0 ? 0.0 : stddev * gen.normal();
}

FeatureMap Conv2d::apply(const FeatureMap& input) const {
    if (input.channels != in_ch_) throw std::invalid_argument("conv input channel mismatch");
    const int pad = kernel_ / 2;
    FeatureMap out(out_ch_, input.rows, input.cols);
    for (int oc = 0; oc < out_ch_; ++oc) {
        for (int y = 0; y < input.rows; ++y) {
            for (int x = 0; x < input.cols; ++x) {
                double acc = b[static_cast<std::size_t>(oc)];
                for (int ic = 0; ic < in_ch_; ++ic) {
                    for (int ky = 0; ky < kernel_; ++ky) {
                        const int iy = y + ky - pad;
                        if (iy < 0 || iy >= input.rows) continue;
                        for (int kx = 0; kx < kernel_; ++kx) {
                            const int ix = x + kx - pad;
                            if (ix < 0 || ix >= input.cols) continue;
                            acc += w[widx(oc, ic, ky, kx)] * input.at(ic, iy, ix);
                        }
                    }
                }
                out.at(oc, y, x) = acc;
            }
        }
    }
    return out;
}

Batch Conv2d::apply(const Batch& inputs) const {
    Batch out;
    out.reserve(inputs.size());
    for (const auto& fm : inputs) out.push_back(apply(fm));
    return out;
}

Conv2d::Grad Conv2d::zero_grad() const {
    return Grad{std::vector<double>(w.size(), 0.0), std::vector<double>(b.size(), 0.0)};
}

Batch Conv2d::backward(const Batch& inputs, const Batch& grad_out, Grad& grad) const {
    if (inputs.size() != grad_out.size()) throw std::invalid_argument("conv backward batch mismatch");
    const int pad = kernel_ / 2;
    Batch grad_in;
    grad_in.reserve(inputs.size());
    for (std::size_t s = 0; s < inputs.size(); ++s) {
        const FeatureMap& in = inputs[s];
        const FeatureMap& go = grad_out[s];
        if (in.channels != in_ch_ || go.channels != out_ch_ || go.rows != in.rows ||
            go.cols != in.cols) {
            throw std::invalid_argument("conv backward shape mismatch");
        }
        FeatureMap gi(in_ch_, in.rows, in.cols);
        for (int oc = 0; oc < out_ch_; ++oc) {
            for (int y = 0; y < in.rows; ++y) {
                for (int x = 0; x < in.cols; ++x) {
                    const double g = go.at(oc, y, x);
                    grad.b[static_cast<std::size_t>(oc)] += g;
                    for (int ic = 0; ic < in_ch_; ++ic) {
                        for (int ky = 0; ky < kernel_; ++ky) {
                            const int iy = y + ky - pad;
                            if (iy < 0 || iy >= in.rows) continue;
                            for (int kx = 0; kx < kernel_; ++kx) {
                                const int ix = x + kx - pad;
                                if (ix < 0 || ix >= in.cols) continue;
                                grad.w[widx(oc, ic, ky, kx)] += g * in.at(ic, iy, ix);
                                gi.at(ic, iy, ix) += g * w[widx(oc, ic, ky, kx)];
                            }
                        }
                    }
                }
            }
        }
        grad_in.push_back(std::move(gi));
    }
    return grad_in;
}

void Conv2d::step(const Grad& grad, double lr) {
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= lr * grad.w[i];
    for (std::size_t i = 0; i < b.size(); ++i) b[i] -= lr * grad.b[i];
}

BatchNorm2d::BatchNorm2d(int channels, double eps_, double momentum_)
    : gamma(static_cast<std::size_t>(channels), 1.0),
      beta(static_cast<std::size_t>(channels), 0.0),
      running_mean(static_cast<std::size_t>(channels), 0.0),
      running_var(static_cast<std::size_t>(channels), 1.0),
      eps(eps_), momentum(momentum_), channels_(channels) {
    if (channels < 1) throw std::invalid_argument("batch norm channel count must be >= 1");
}

Batch BatchNorm2d::forward_train(const Batch& inputs, Cache& cache) {
    if (inputs.empty()) throw std::invalid_argument("batch norm train batch is empty");
    const int rows = inputs.front().rows;
    const int cols = inputs.front().cols;
    const double count = static_cast<double>(inputs.size()) * rows * cols;

    cache.mean.assign(static_cast<std::size_t>(channels_), 0.0);
    cache.inv_std.assign(static_cast<std::size_t>(channels_), 0.0);

    for (int c = 0; c < channels_; ++c) {
        double sum = 0.0;
        for (const auto& fm : inputs) {
            if (fm.channels != channels_) throw std::invalid_argument("batch norm channel mismatch");
            for (int y = 0; y < rows; ++y)
                for (int x = 0; x < cols; ++x) sum += fm.at(c, y, x);
        }
        const double mu = sum / count;
        double sq = 0.0;
        for (const auto& fm : inputs) {
            for (int y = 0; y < rows; ++y)
                for (int x = 0; x < cols; ++x) {
                    const double d = fm.at(c, y, x) - mu;
                    sq += d * d;
                }
        }
        const double var = sq / count;
        cache.mean[static_cast<std::size_t>(c)] = mu;
        cache.inv_std[static_cast<std::size_t>(c)] = 1.0 / std::sqrt(var + eps);
        running_mean[static_cast<std::size_t>(c)] =
            (1.0 - momentum) * running_mean[static_cast<std::size_t>(c)] + momentum * mu;
        running_var[static_cast<std::size_t>(c)] =
            (1.0 - momentum) * running_var[static_cast<std::size_t>(c)] + momentum * var;
    }

    cache.x_hat.clear();
    cache.x_hat.reserve(inputs.size());
    Batch out;
    out.reserve(inputs.size());
    for (const auto& fm : inputs) {
        FeatureMap xh(channels_, rows, cols);
        FeatureMap y(channels_, rows, cols);
        for (int c = 0; c < channels_; ++c) {
            const double mu = cache.mean[static_cast<std::size_t>(c)];
            const double is = cache.inv_std[static_cast<std::size_t>(c)];
            for (int r = 0; r < rows; ++r)
                for (int x = 0; x < cols; ++x) {
                    const double v = (fm.at(c, r, x) - mu) * is;
                    xh.at(c, r, x) = v;
                    y.at(c, r, x) = gamma[static_cast<std::size_t>(c)] * v +
                                    beta[static_cast<std::size_t>(c)];
                }
        }
        cache.x_hat.push_back(std::move(xh));
        out.push_back(std::move(y));
    }
    return out;
}

FeatureMap BatchNorm2d::apply(const FeatureMap& input) const {
    if (input.channels != channels_) throw std::invalid_argument("batch norm channel mismatch");
    FeatureMap out(channels_, input.rows, input.cols);
    for (int c = 0; c < channels_; ++c) {
        const double mu = running_mean[static_cast<std::size_t>(c)];
        const double is = 1.0 / std::sqrt(running_var[static_cast<std::size_t>(c)] + eps);
        for (int r = 0; r < input.rows; ++r)
            for (int x = 0; x < input.cols; ++x) {
                out.at(c, r, x) = gamma[static_cast<std::size_t>(c)] * (input.at(c, r, x) - mu) * is +
                                  beta[static_cast<std::size_t>(c)];
            }
    }
    return out;
}

Batch BatchNorm2d::apply(const Batch& inputs) const {
    Batch out;
    out.reserve(inputs.size());
    for (const auto& fm : inputs) out.push_back(apply(fm));
    return out;
}

BatchNorm2d::Grad BatchNorm2d::zero_grad() const {
    return Grad{std::vector<double>(gamma.size(), 0.0), std::vector<double>(beta.size(), 0.0)};
}

Batch BatchNorm2d::backward(const Cache& cache, const Batch& grad_out, Grad& grad) const {
    if (cache.x_hat.size() != grad_out.size()) throw std::invalid_argument("batch norm backward batch mismatch");
    const int rows = grad_out.front().rows;
    const int cols = grad_out.front().cols;
    const double count = static_cast<double>(grad_out.size()) * rows * cols;

    Batch grad_in;
    grad_in.reserve(grad_out.size());
    for (const auto& go : grad_out) grad_in.emplace_back(channels_, go.rows, go.cols);

    for (int c = 0; c < channels_; ++c) {
        double sum_g = 0.0;
        double sum_gx = 0.0;
        for (std::size_t s = 0; s < grad_out.size(); ++s) {
            for (int r = 0; r < rows; ++r)
                for (int x = 0; x < cols; ++x) {
                    const double g = grad_out[s].at(c, r, x);
                    sum_g += g;
                    sum_gx += g * cache.x_hat[s].at(c, r, x);
                }
        }
        grad.beta[static_cast<std::size_t>(c)] += sum_g;
        grad.gamma[static_cast<std::size_t>(c)] += sum_gx;

        const double gm = gamma[static_cast<std::size_t>(c)];
        const double is = cache.inv_std[static_cast<std::size_t>(c)];
        const double mean_g = sum_g / count;
        const double mean_gx = sum_gx / count;
        for (std::size_t s = 0; s < grad_out.size(); ++s) {
            for (int r = 0; r < rows; ++r)
                for (int x = 0; x < cols; ++x) {
                    const double g = grad_out[s].at(c, r, x);
                    const double xh = cache.x_hat[s].at(c, r, x);
                    grad_in[s].at(c, r, x) = gm * is * (g - mean_g - xh * mean_gx);
                }
        }
    }
    return grad_in;
}

void BatchNorm2d::step(const Grad& grad, double lr) {
    for (std::size_t i = 0; i < gamma.size(); ++i) gamma[i] -= lr * grad.gamma[i];
    for (std::size_t i = 0; i < beta.size(); ++i) beta[i] -= lr * grad.beta[i];
}

FeatureMap relu(const FeatureMap& input) {
    FeatureMap out = input;
    for (auto& v : out.data) v = v > 0.0 ? v : 0.0;
    return out;
}

Batch relu(const Batch& inputs) {
    Batch out;
    out.reserve(inputs.size());
    for (const auto& fm : inputs) out.push_back(relu(fm));
    return out;
}

Batch relu_backward(const Batch& inputs, const Batch& grad_out) {
    if (inputs.size() != grad_out.size()) throw std::invalid_argument("relu backward batch mismatch");
    Batch grad_in;
    grad_in.reserve(inputs.size());
    for (std::size_t s = 0; s < inputs.size(); ++s) {
        FeatureMap gi = grad_out[s];
        for (std::size_t i = 0; i < gi.data.size(); ++i) {
            if (inputs[s].data[i] <= 0.0) gi.data[i] = 0.0;
        }
        grad_in.push_back(std::move(gi));
    }
    return grad_in;
}

Dense::Dense(int in_size, int out_size, rng::Generator& gen, double init_scale) {
    if (in_size < 1 || out_size < 1) throw std::invalid_argument("dense sizes must be >= 1");
    const double stddev = init_scale * std::sqrt(2.0 / static_cast<double>(in_size));
    w.resize(out_size, in_size);
    for (int r = 0; r < out_size; ++r) {
        for (int c = 0; c < in_size; ++c) {
            w(r, c) = stddev == 0.0 ? 0.0 : stddev * gen.normal();
        }
    }
    b = Eigen::VectorXd::Zero(out_size);
}

Eigen::VectorXd Dense::apply(const Eigen::VectorXd& input) const {
    if (input.size() != w.cols()) throw std::invalid_argument("dense input size mismatch");
    return w * input + b;
}

Dense::Grad Dense::zero_grad() const {
    return Grad{Eigen::MatrixXd::Zero(w.rows(), w.cols()), Eigen::VectorXd::Zero(b.size())};
}

Eigen::VectorXd Dense::backward(const Eigen::VectorXd& input, const Eigen::VectorXd& grad_out,
                                Grad& grad) const {
    grad.w += grad_out * input.transpose();
    grad.b += grad_out;
    return w.transpose() * grad_out;
}

void Dense::step(const Grad& grad, double lr) {
    w -= lr * grad.w;
    b -= lr * grad.b;
}

} // namespace lifi::neural
