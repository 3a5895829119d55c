// SPDX-License-Identifier: Apache-2.0
//
// Hand-rolled neural primitives with analytic gradients: 2-D convolution,
// batch normalization, ReLU, and a dense layer. Double precision throughout
// so gradients can be validated against central finite differences.

#pragma once

#include <vector>

#include <Eigen/Dense>

#include "lifi/neural/feature_map.hpp"
#include "lifi/rng.hpp"

namespace lifi::neural {

// Same-size 2-D convolution: odd kernel, stride 1, zero padding.
class Conv2d {
  public:
    // init_scale multiplies the He-normal weight magnitude; 0 gives an
    // all-zero layer (used for the residual tail so a fresh block starts as
    // the identity map).
    Conv2d(int in_channels, int out_channels, int kernel, rng::Generator& gen,
           double init_scale = 1.0);

    FeatureMap apply(const FeatureMap& input) const;
    Batch apply(const Batch& inputs) const;

    struct Grad {
        std::vector<double> w;
        std::vector<double> b;
    };
    Grad zero_grad() const;

    // Accumulates parameter gradients for the given upstream batch gradient
    // and returns the gradient with respect to the inputs.
    Batch backward(const Batch& inputs, const Batch& grad_out, Grad& grad) const;

    void step(const Grad& grad, double lr);

    int in_channels() const { return in_ch_; }
    int out_channels() const { return out_ch_; }
    int kernel() const { return kernel_; }

    std::vector<double> w; // [out][in][ky][kx]
    std::vector<double> b; // [out]

  private:
    std::size_t widx(int oc, int ic, int ky, int kx) const {
        return ((static_cast<std::size_t>(oc) * static_cast<std::size_t>(in_ch_) +
                 static_cast<std::size_t>(ic)) *
                    static_cast<std::size_t>(kernel_) +
                static_cast<std::size_t>(ky)) *
                   static_cast<std::size_t>(kernel_) +
               static_cast<std::size_t>(kx);
    }

    int in_ch_;
    int out_ch_;
    int kernel_;
};

// Per-channel batch normalization over (batch, rows, cols).
class BatchNorm2d {
  public:
    explicit BatchNorm2d(int channels, double eps = 1e-5, double momentum = 0.1);

    struct Cache {
        std::vector<double> mean;
        std::vector<double> inv_std;
        Batch x_hat;
    };

    // Batch statistics; updates running estimates.
    Batch forward_train(const Batch& inputs, Cache& cache);

    // Inference mode: frozen running statistics.
    FeatureMap apply(const FeatureMap& input) const;
    Batch apply(const Batch& inputs) const;

    struct Grad {
        std::vector<double> gamma;
        std::vector<double> beta;
    };
    Grad zero_grad() const;

    Batch backward(const Cache& cache, const Batch& grad_out, Grad& grad) const;

    void step(const Grad& grad, double lr);

    int channels() const { return channels_; }

    std::vector<double> gamma;
    std::vector<double> beta;
    std::vector<double> running_mean;
    std::vector<double> running_var;
    double eps;
    double momentum;

  private:
    int channels_;
};

FeatureMap relu(const FeatureMap& input);
Batch relu(const Batch& inputs);
// Gradient of relu given the layer INPUT.
Batch relu_backward(const Batch& inputs, const Batch& grad_out);

// Fully connected layer y = W x + b.
class Dense {
  public:
    Dense() = default;
    Dense(int in_size, int out_size, rng::Generator& gen, double init_scale = 1.0);

    Eigen::VectorXd apply(const Eigen::VectorXd& input) const;

    struct Grad {
        Eigen::MatrixXd w;
        Eigen::VectorXd b;
    };
    Grad zero_grad() const;

    Eigen::VectorXd backward(const Eigen::VectorXd& input, const Eigen::VectorXd& grad_out,
                             Grad& grad) const;

    void step(const Grad& grad, double lr);

    Eigen::MatrixXd w;
    Eigen::VectorXd b;
};

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

} // namespace lifi::neural
