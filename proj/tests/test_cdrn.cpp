// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lifi/neural/cdrn.hpp"
#include "lifi/neural/metrics.hpp"
#include "support/oracles.hpp"

using namespace lifi;
using neural::CdrnConfig;
using neural::TrainingPair;

namespace {

// Channel windows drift slowly across window indices (AR across k, ripple
// within the window); LS inputs are the truth plus white noise.
std::vector<TrainingPair> synthetic_pairs(std::size_t count, int length, double level,
                                          double ls_noise, std::uint64_t seed) {
    rng::Generator gen(seed);
    std::vector<Eigen::VectorXd> truth(count + 1), ls(count + 1);
    double base = level;
    for (std::size_t k = 0; k <= count; ++k) {
        base = level + 0.9 * (base - level) + 0.02 * level * gen.normal();
        truth[k].resize(length);
        ls[k].resize(length);
        for (int l = 0; l < length; ++l) {
            truth[k][l] = base * (1.0 + 0.01 * std::sin(0.7 * l + static_cast<double>(k)));
            ls[k][l] = truth[k][l] + ls_noise * gen.normal();
        }
    }
    std::vector<TrainingPair> pairs;
    for (std::size_t k = 0; k < count; ++k) {
        pairs.push_back(TrainingPair{ls[k], ls[k + 1], truth[k + 1]});
    }
    return pairs;
}

double mean_input_nmse(const std::vector<TrainingPair>& pairs) {
    double acc = 0.0;
    for (const auto& p : pairs) acc += neural::nmse(p.ls_next, p.target);
    return acc / static_cast<double>(pairs.size());
}

double mean_output_nmse(const neural::CdrnModel& model, const std::vector<TrainingPair>& pairs) {
    double acc = 0.0;
    for (const auto& p : pairs) {
        const auto [h_prev, h_next] = neural::cdrn_denoise(model, p.ls_prev, p.ls_next);
        acc += neural::nmse(h_next, p.target);
    }
    return acc / static_cast<double>(pairs.size());
}

} // namespace

TEST_CASE("cdrn_train: noiseless pairs sit at the zero-residual fixed point") {
    const auto pairs = synthetic_pairs(20, 8, 1.0, 0.0, 81);
    CdrnConfig cfg;
    cfg.epochs = 5;
    cfg.seed = 1;
    const auto result = neural::cdrn_train(pairs, cfg);
    CHECK(result.loss_history.back() < 1e-6);
}

TEST_CASE("cdrn_train: overfits a single repeated pair") {
    auto pairs = synthetic_pairs(1, 8, 1.0, 0.3, 82);
    std::vector<TrainingPair> repeated(16, pairs[0]);
    CdrnConfig cfg;
    cfg.epochs = 200;
    cfg.learning_rate = 1e-3;
    cfg.batch_size = 16;
    cfg.seed = 2;
    const auto result = neural::cdrn_train(repeated, cfg);
    CHECK(result.loss_history.back() <= 0.5 * result.loss_history.front());
}

TEST_CASE("cdrn_train: bit-identical loss histories per seed") {
    const auto pairs = synthetic_pairs(12, 8, 1.0, 0.2, 83);
    CdrnConfig cfg;
    cfg.epochs = 10;
    cfg.seed = 7;
    const auto a = neural::cdrn_train(pairs, cfg);
    const auto b = neural::cdrn_train(pairs, cfg);
    CHECK(a.loss_history == b.loss_history);
    cfg.seed = 8;
    const auto c = neural::cdrn_train(pairs, cfg);
    CHECK(a.loss_history != c.loss_history);
}

TEST_CASE("cdrn_train: desk-scale model denoises below the LS input error") {
    // SNR 10 dB: LS noise std is level / sqrt(10).
    const double level = 1.0;
    const double noise = level / std::sqrt(10.0);
    const auto train_pairs = synthetic_pairs(120, 16, level, noise, 84);
    const auto eval_pairs = synthetic_pairs(40, 16, level, noise, 85);

    CdrnConfig cfg;
    cfg.blocks = 2;
    cfg.layers_per_block = 3;
    cfg.filters = 8;
    cfg.epochs = 60;
    cfg.learning_rate = 3e-3;
    cfg.batch_size = 16;
    cfg.seed = 3;
    const auto result = neural::cdrn_train(train_pairs, cfg);

    const double in_nmse = mean_input_nmse(eval_pairs);
    const double out_nmse = mean_output_nmse(result.model, eval_pairs);
    CHECK(out_nmse < in_nmse);

    // Smoothed loss trend (window 10) must not increase.
    const auto& loss = result.loss_history;
    auto smoothed = [&](std::size_t i) {
        double acc = 0.0;
        for (std::size_t j = i; j < i + 10; ++j) acc += loss[j];
        return acc / 10.0;
    };
    const double first = smoothed(0);
    const double last = smoothed(loss.size() - 10);
    CHECK(last <= first);
    for (std::size_t i = 0; i + 20 < loss.size(); i += 10) {
        REQUIRE(smoothed(i + 10) <= smoothed(i) * 1.05);
    }
}

TEST_CASE("cdrn_train: divergence reports the epoch") {
    const auto pairs = synthetic_pairs(4, 8, 1.0, 0.3, 86);
    CdrnConfig cfg;
    cfg.epochs = 50;
    cfg.learning_rate = 1e9;
    cfg.seed = 4;
    CHECK_THROWS_WITH_AS(neural::cdrn_train(pairs, cfg), doctest::Contains("epoch"),
                         std::runtime_error);
}

TEST_CASE("cdrn_train: input validation") {
    CdrnConfig cfg;
    CHECK_THROWS_AS(neural::cdrn_train({}, cfg), std::invalid_argument);
    cfg.kernel = 4;
    CHECK_THROWS_AS(neural::cdrn_train(synthetic_pairs(2, 4, 1.0, 0.1, 87), cfg),
                    std::invalid_argument);
}

TEST_CASE("build_training_pairs: zero noise reproduces the truth exactly") {
    channel::ChannelTrace trace;
    trace.sample_rate = 1000.0;
    rng::Generator gen(88);
    for (int i = 0; i < 100; ++i) {
        trace.gains.push_back(Eigen::MatrixXd::Constant(1, 1, 1e-5 * (1.0 + 0.1 * gen.uniform01())));
    }
    coherence::CoherenceResult coh;
    coh.n_c = 10;
    coh.coherence_time = 0.01;

    estimation::PilotConstraints pc;
    pc.length = 8;
    pc.peak = 1.0;
    pc.average = 0.5;
    const auto pilot = estimation::uniform_pilot(pc);

    const auto pairs = neural::build_training_pairs(trace, coh, pilot, 0.0, 5);
    REQUIRE(pairs.size() == 9); // 10 windows pair into 9
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        for (int l = 0; l < 8; ++l) {
            const double truth = trace.gains[(k + 1) * 10 + static_cast<std::size_t>(l)](0, 0);
            REQUIRE(pairs[k].target[l] == truth);
            REQUIRE(pairs[k].ls_next[l] == doctest::Approx(truth).epsilon(1e-12));
        }
    }
}

TEST_CASE("build_training_pairs: input noise matches the per-slot LS variance oracle") {
    channel::ChannelTrace trace;
    trace.sample_rate = 1000.0;
    const double h = 2.0e-5;
    for (int i = 0; i < 40000; ++i) trace.gains.push_back(Eigen::MatrixXd::Constant(1, 1, h));
    coherence::CoherenceResult coh;
    coh.n_c = 8;

    estimation::PilotConstraints pc;
    pc.length = 8;
    pc.peak = 1.0;
    pc.average = 0.5;
    const auto pilot = estimation::uniform_pilot(pc);
    const double sigma2 = 1e-11;

    const auto pairs = neural::build_training_pairs(trace, coh, pilot, sigma2, 6);
    oracles::Welford stats;
    for (const auto& p : pairs) {
        for (int l = 0; l < 8; ++l) stats.add(p.ls_next[l] - p.target[l]);
    }
    const double theory = sigma2 / (0.5 * 0.5); // sigma^2 / a[l]^2
    CHECK(stats.variance() == doctest::Approx(theory).epsilon(0.10));
    CHECK(std::abs(stats.mean) < 5.0 * std::sqrt(theory / static_cast<double>(stats.count)));
}

TEST_CASE("build_training_pairs: outage, short windows, and dark pilots are rejected") {
    channel::ChannelTrace trace;
    trace.sample_rate = 1000.0;
    for (int i = 0; i < 100; ++i) trace.gains.push_back(Eigen::MatrixXd::Constant(1, 1, 1e-5));

    estimation::PilotConstraints pc;
    pc.length = 8;
    pc.peak = 1.0;
    pc.average = 0.5;
    const auto uniform = estimation::uniform_pilot(pc);

    coherence::CoherenceResult outage;
    outage.outage = true;
    outage.n_c = 0;
    CHECK_THROWS_AS(neural::build_training_pairs(trace, outage, uniform, 0.0, 0),
                    std::domain_error);

    coherence::CoherenceResult tiny;
    tiny.n_c = 4; // shorter than the pilot
    CHECK_THROWS_AS(neural::build_training_pairs(trace, tiny, uniform, 0.0, 0),
                    std::invalid_argument);

    coherence::CoherenceResult ok;
    ok.n_c = 10;
    const auto dark = estimation::design_pilot(pc); // contains zero-amplitude slots
    CHECK_THROWS_AS(neural::build_training_pairs(trace, ok, dark, 0.0, 0),
                    std::invalid_argument);
}

TEST_CASE("build_training_pairs: deterministic per seed") {
    channel::ChannelTrace trace;
    trace.sample_rate = 1000.0;
    for (int i = 0; i < 64; ++i) trace.gains.push_back(Eigen::MatrixXd::Constant(1, 1, 1e-5));
    coherence::CoherenceResult coh;
    coh.n_c = 8;
    estimation::PilotConstraints pc;
    pc.length = 8;
    pc.peak = 1.0;
    pc.average = 0.5;
    const auto pilot = estimation::uniform_pilot(pc);

    const auto a = neural::build_training_pairs(trace, coh, pilot, 1e-12, 9);
    const auto b = neural::build_training_pairs(trace, coh, pilot, 1e-12, 9);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        REQUIRE(a[i].ls_next == b[i].ls_next);
        REQUIRE(a[i].ls_prev == b[i].ls_prev);
    }
}
