// SPDX-License-Identifier: Apache-2.0
//
// Cascaded residual denoising network for pilot-based channel estimates.
// Each denoising block learns the residual noise of its input and subtracts
// it; the stack refines a coarse least-squares estimate pair.

#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "lifi/channel.hpp"
#include "lifi/coherence.hpp"
#include "lifi/estimation.hpp"
#include "lifi/neural/layers.hpp"

namespace lifi::neural {

struct CdrnConfig {
    int blocks{2};          // D
    int layers_per_block{3}; // last layer is a plain conv back to one channel
    int filters{8};
    int kernel{3};
    double learning_rate{1e-3};
    int epochs{200};
    int batch_size{16};
    std::uint64_t seed{0};

    void validate() const;
};

// Consecutive-window sample: coarse LS estimates for windows k and k+1 plus
// the true channel of window k+1.
struct TrainingPair {
    Eigen::VectorXd ls_prev;
    Eigen::VectorXd ls_next;
    Eigen::VectorXd target;

    void validate() const;
};

class CdrnModel {
  public:
    struct Block {
        std::vector<Conv2d> convs;
        std::vector<BatchNorm2d> bns; // one per conv except the final one
    };

    CdrnModel() = default;
    explicit CdrnModel(const CdrnConfig& cfg);

    // Denoised map: input minus the accumulated residual estimates
    // (inference-mode batch norm).
    FeatureMap apply(const FeatureMap& input) const;

    // Residual estimate of a single block (inference mode).
    FeatureMap block_residual(const Block& block, const FeatureMap& input) const;

    const CdrnConfig& config() const { return cfg_; }

    CdrnConfig cfg_;
    std::vector<Block> blocks_;
    // Inputs are divided by this power-of-two before the network and scaled
    // back after it, so weights train at O(1) magnitudes regardless of the
    // physical gain scale. Powers of two keep the round trip exact.
    double input_scale{1.0};
};

struct CdrnTrainResult {
    CdrnModel model;
    std::vector<double> loss_history; // mean NMSE loss per epoch
};

// Gradient-descent training on the NMSE of the second (k+1) row.
// Deterministic per cfg.seed; throws with the epoch index if the loss
// diverges to a non-finite value.
CdrnTrainResult cdrn_train(const std::vector<TrainingPair>& pairs, const CdrnConfig& cfg);

FeatureMap cdrn_forward(const CdrnModel& model, const FeatureMap& input);

// Arranges an estimate pair as a 2-row map, denoises it, and returns the
// (h_k, h_{k+1}) rows. Only the second row is scored during training; the
// first is produced for completeness.
std::pair<Eigen::VectorXd, Eigen::VectorXd> cdrn_denoise(const CdrnModel& model,
                                                         const Eigen::VectorXd& ls_prev,
                                                         const Eigen::VectorXd& ls_next);

FeatureMap pair_to_map(const Eigen::VectorXd& ls_prev, const Eigen::VectorXd& ls_next);

// Segments a channel trace into coherence-time windows, simulates a pilot
// transmission in the first pilot-length slots of each window, forms per-slot
// LS estimates, and pairs consecutive windows. Requires a positive coherence
// time, a window at least as long as the pilot, and strictly positive pilot
// amplitudes.
std::vector<TrainingPair> build_training_pairs(const channel::ChannelTrace& trace,
                                               const coherence::CoherenceResult& coh,
                                               const estimation::PilotDesign& pilot,
                                               double noise_var, std::uint64_t seed, int led = 0,
                                               int pd = 0);

} // namespace lifi::neural
