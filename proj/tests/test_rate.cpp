// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lifi/rate.hpp"
#include "support/oracles.hpp"

using namespace lifi;
using rate::BeamformerPolicy;
using rate::Constellation;
using rate::RateConfig;

namespace {

RateConfig test_config(std::size_t samples = 20000, std::uint64_t seed = 1) {
    RateConfig rc;
    rc.bandwidth = 20e6;
    rc.noise_var = 1e-12;
    rc.mc_samples = samples;
    rc.seed = seed;
    return rc;
}

// Gain that puts h * (adjacent spacing) at `factor` times sqrt(B) sigma.
double gain_for_snr_factor(const Constellation& c, const RateConfig& rc, double factor) {
    const double spacing = c.points[1] - c.points[0];
    return factor * std::sqrt(rc.bandwidth) * std::sqrt(rc.noise_var) / spacing;
}

} // namespace

TEST_CASE("pam_uniform: binary constellation endpoints") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    REQUIRE(c.points.size() == 2);
    CHECK(c.points[0] == 0.0);
    CHECK(c.points[1] == 1.0);
    CHECK(c.probs[0] == 0.5);
    CHECK(c.probs[1] == 0.5);
}

TEST_CASE("pam_uniform: 4-PAM spacing") {
    const auto c = rate::pam_uniform(4, 3.0, 1.5, 3.5);
    REQUIRE(c.points.size() == 4);
    for (int k = 0; k < 4; ++k) CHECK(c.points[static_cast<std::size_t>(k)] == doctest::Approx(k));
}

TEST_CASE("pam_uniform: violated average-power cap is reported") {
    CHECK_THROWS_WITH_AS(rate::pam_uniform(2, 1.0, 0.4, 0.5) /* mean 0.5 > 0.4 */,
                         doctest::Contains("average optical cap"), std::invalid_argument);
    CHECK_THROWS_WITH_AS(rate::pam_uniform(2, 1.0, 0.5, 0.4) /* power 0.5 > 0.4 */,
                         doctest::Contains("electrical power cap"), std::invalid_argument);
}

TEST_CASE("rate_siso: zero gain carries no information") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    const auto rc = test_config(100000, 2);
    const auto est = rate::rate_siso(0.0, c, rc);
    CHECK(std::abs(est.bits_per_s) <= 4.0 * est.std_error);
    CHECK(est.clamped_bits_per_s >= 0.0);
}

TEST_CASE("rate_siso: high-SNR 2-PAM saturates at 2B bits") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    const auto rc = test_config(100000, 3);
    const double h = gain_for_snr_factor(c, rc, 100.0);
    const auto est = rate::rate_siso(h, c, rc);
    CHECK(std::abs(est.bits_per_s - 40e6) / 40e6 < 0.01);
}

TEST_CASE("rate_siso: high-SNR 4-PAM saturates at 4B bits") {
    const auto c = rate::pam_uniform(4, 3.0, 1.5, 3.5);
    const auto rc = test_config(100000, 4);
    const double h = gain_for_snr_factor(c, rc, 100.0);
    const auto est = rate::rate_siso(h, c, rc);
    CHECK(std::abs(est.bits_per_s - 80e6) / 80e6 < 0.01);
}

TEST_CASE("rate_siso: negative gain rejected, per-seed bit determinism") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    const auto rc = test_config(5000, 5);
    CHECK_THROWS_AS(rate::rate_siso(-1.0, c, rc), std::invalid_argument);
    const auto a = rate::rate_siso(3e-6, c, rc);
    const auto b = rate::rate_siso(3e-6, c, rc);
    CHECK(a.bits_per_s == b.bits_per_s);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("rate_siso: monotone in the gain under common random numbers") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    const auto rc = test_config(50000, 6);
    const double base = gain_for_snr_factor(c, rc, 0.05);
    double previous = -1e18;
    for (double factor : {0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0, 100.0}) {
        const auto est = rate::rate_siso(base * factor, c, rc);
        REQUIRE(est.bits_per_s >= previous);
        previous = est.bits_per_s;
    }
}

TEST_CASE("rate_siso: estimates stay within the information-theoretic bounds") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    rng::Generator gen(7);
    for (int i = 0; i < 10; ++i) {
        const auto rc = test_config(20000, 100 + i);
        const double h = gain_for_snr_factor(c, rc, 30.0 * gen.uniform01());
        const auto est = rate::rate_siso(h, c, rc);
        const double slack = 4.0 * est.std_error;
        REQUIRE(est.bits_per_s >= -slack);
        REQUIRE(est.bits_per_s <= 2.0 * rc.bandwidth * 1.0 + slack);
        REQUIRE(est.clamped_bits_per_s >= 0.0);
    }
}

TEST_CASE("rate_simo: single-branch selection reduces to SISO") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    const auto rc = test_config(20000, 8);
    Eigen::VectorXd h(2), omega(2);
    h << 4e-6, 0.0;
    omega << 1.0, 0.0;
    const auto simo = rate::rate_simo(h, omega, c, rc);
    const auto siso = rate::rate_siso(4e-6, c, rc);
    CHECK(simo.bits_per_s == siso.bits_per_s);
}

TEST_CASE("rate_simo: zero combiner yields zero rate") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    const auto rc = test_config(20000, 9);
    Eigen::VectorXd h(2), omega(2);
    h << 4e-6, 3e-6;
    omega << 0.0, 0.0;
    const auto est = rate::rate_simo(h, omega, c, rc);
    CHECK(std::abs(est.bits_per_s) <= 4.0 * est.std_error);
}

TEST_CASE("rate_simo: MRC collapses to the gain norm") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    const auto rc = test_config(20000, 10);
    Eigen::VectorXd h(2);
    h << 3e-6, 4e-6;
    const Eigen::VectorXd omega = h / h.norm();
    const auto simo = rate::rate_simo(h, omega, c, rc);
    const auto siso = rate::rate_siso(5e-6, c, rc);
    CHECK(simo.bits_per_s == doctest::Approx(siso.bits_per_s).epsilon(1e-9));
    Eigen::VectorXd wrong(3);
    wrong << 1, 1, 1;
    CHECK_THROWS_AS(rate::rate_simo(h, wrong, c, rc), std::invalid_argument);
}

TEST_CASE("rate_miso mirrors rate_simo") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    const auto rc = test_config(20000, 11);
    Eigen::VectorXd h(3), q(3);
    h << 2e-6, 5e-6, 1e-6;
    q << 0.0, 1.0, 0.0;
    CHECK(rate::rate_miso(h, q, c, rc).bits_per_s ==
          rate::rate_siso(5e-6, c, rc).bits_per_s);
    const Eigen::VectorXd matched = h / h.norm();
    CHECK(rate::rate_miso(h, matched, c, rc).bits_per_s ==
          doctest::Approx(rate::rate_siso(h.norm(), c, rc).bits_per_s).epsilon(1e-9));
    const Eigen::VectorXd zero = Eigen::VectorXd::Zero(3);
    const auto est = rate::rate_miso(zero, matched, c, rc);
    CHECK(std::abs(est.bits_per_s) <= 4.0 * est.std_error);
}

TEST_CASE("rate_mimo: 1x1 reduces to SISO and rank-1 to the singular value") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    const auto rc = test_config(20000, 12);
    Eigen::MatrixXd h11(1, 1);
    h11 << 6e-6;
    Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
    CHECK(rate::rate_mimo(h11, one, one, c, rc).bits_per_s ==
          rate::rate_siso(6e-6, c, rc).bits_per_s);

    Eigen::VectorXd a(2), b(3);
    a << 3e-6, 4e-6;
    b << 1.0, 2.0, 2.0;
    const Eigen::MatrixXd h = a * b.transpose();
    const auto mimo = rate::rate_mimo(h, a / a.norm(), b / b.norm(), c, rc);
    const auto siso = rate::rate_siso(a.norm() * b.norm(), c, rc);
    CHECK(mimo.bits_per_s == doctest::Approx(siso.bits_per_s).epsilon(1e-9));

    const auto zero_q = rate::rate_mimo(h, Eigen::VectorXd::Zero(2), b / b.norm(), c, rc);
    CHECK(std::abs(zero_q.bits_per_s) <= 4.0 * zero_q.std_error);
    CHECK_THROWS_AS(rate::rate_mimo(h, b, a, c, rc), std::invalid_argument);
}

TEST_CASE("choose_beamformers: rank-1 dominant pair attains the singular value") {
    Eigen::VectorXd a(3), b(2);
    a << 1.0, 2.0, 2.0;
    b << 3.0, 4.0;
    const Eigen::MatrixXd h = a * b.transpose();
    const auto bf = rate::choose_beamformers(h, BeamformerPolicy::dominant_singular);
    CHECK(rate::effective_gain(h, bf) == doctest::Approx(a.norm() * b.norm()).epsilon(1e-9));
    CHECK(bf.tx.norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(bf.rx.norm() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("choose_beamformers: 1x1 uniform policy is the unit pair") {
    Eigen::MatrixXd h(1, 1);
    h << 1.0;
    const auto bf = rate::choose_beamformers(h, BeamformerPolicy::uniform);
    CHECK(rate::effective_gain(h, bf) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("choose_beamformers: dominant pair never loses to uniform") {
    rng::Generator gen(13);
    for (int trial = 0; trial < 200; ++trial) {
        const int k = 1 + static_cast<int>(gen.below(4));
        const int n = 1 + static_cast<int>(gen.below(4));
        Eigen::MatrixXd h(k, n);
        for (int i = 0; i < k; ++i)
            for (int j = 0; j < n; ++j) h(i, j) = gen.uniform01();
        const auto dom = rate::choose_beamformers(h, BeamformerPolicy::dominant_singular);
        const auto uni = rate::choose_beamformers(h, BeamformerPolicy::uniform);
        REQUIRE(rate::effective_gain(h, dom) >= rate::effective_gain(h, uni) - 1e-12);
    }
}

TEST_CASE("choose_beamformers: MRC specializations match h over its norm") {
    Eigen::MatrixXd simo(1, 3);
    simo << 1.0, 2.0, 2.0;
    const auto bf = rate::choose_beamformers(simo, BeamformerPolicy::mrc);
    CHECK(rate::effective_gain(simo, bf) == doctest::Approx(3.0).epsilon(1e-12)); // ||h||
    Eigen::MatrixXd miso(3, 1);
    miso << 2.0, 3.0, 6.0;
    const auto bf2 = rate::choose_beamformers(miso, BeamformerPolicy::mrc);
    CHECK(rate::effective_gain(miso, bf2) == doctest::Approx(7.0).epsilon(1e-12));
}

TEST_CASE("choose_beamformers: zero matrix falls back to uniform with a warning") {
    const Eigen::MatrixXd h = Eigen::MatrixXd::Zero(2, 3);
    const auto bf = rate::choose_beamformers(h, BeamformerPolicy::dominant_singular);
    CHECK(bf.zero_gain_warning);
    CHECK(bf.rx.norm() == doctest::Approx(1.0));
    CHECK(bf.tx.norm() == doctest::Approx(1.0));
    Eigen::MatrixXd neg(1, 1);
    neg << -1.0;
    CHECK_THROWS_AS(rate::choose_beamformers(neg, BeamformerPolicy::mrc), std::invalid_argument);
}

TEST_CASE("rate_along_trace: all-zero and constant traces") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    const auto rc = test_config(5000, 14);

    channel::ChannelTrace zeros;
    zeros.sample_rate = 100.0;
    zeros.gains.assign(5, Eigen::MatrixXd::Zero(1, 2));
    rate::TraceRateOptions opts;
    opts.topology = rate::Topology::simo;
    opts.led_indices = {0};
    opts.pd_indices = {0, 1};
    const auto zero_series = rate::rate_along_trace(zeros, opts, c, rc);
    REQUIRE(zero_series.size() == 5);
    for (const auto& p : zero_series) {
        REQUIRE(p.rate.clamped_bits_per_s >= 0.0);
        REQUIRE(std::abs(p.rate.bits_per_s) <= 4.0 * p.rate.std_error);
    }

    channel::ChannelTrace constant;
    constant.sample_rate = 100.0;
    Eigen::MatrixXd g(1, 2);
    g << 4e-6, 2e-6;
    constant.gains.assign(6, g);
    const auto series = rate::rate_along_trace(constant, opts, c, rc);
    for (const auto& p : series) {
        REQUIRE(p.rate.bits_per_s == series.front().rate.bits_per_s);
    }
}

TEST_CASE("rate_along_trace: two-PD MRC SIMO dominates each single-PD SISO") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    auto rc = test_config(20000, 15);
    rc.noise_var = 1e-11;

    // Slot gains shaped like a sitting trace with one strong and one weak PD.
    rng::Generator gen(16);
    channel::ChannelTrace trace;
    trace.sample_rate = 100.0;
    for (int i = 0; i < 20; ++i) {
        Eigen::MatrixXd slot(1, 2);
        slot << 5e-6 * (0.8 + 0.4 * gen.uniform01()), 2e-6 * gen.uniform01();
        trace.gains.push_back(slot);
    }

    rate::TraceRateOptions simo;
    simo.topology = rate::Topology::simo;
    simo.led_indices = {0};
    simo.pd_indices = {0, 1};
    simo.policy = BeamformerPolicy::mrc;
    const auto r2 = rate::rate_along_trace(trace, simo, c, rc);

    for (int pd = 0; pd < 2; ++pd) {
        rate::TraceRateOptions siso;
        siso.topology = rate::Topology::siso;
        siso.led_indices = {0};
        siso.pd_indices = {pd};
        const auto r1 = rate::rate_along_trace(trace, siso, c, rc);
        for (std::size_t i = 0; i < r1.size(); ++i) {
            REQUIRE(r2[i].rate.bits_per_s >=
                    r1[i].rate.bits_per_s - 2.0 * r1[i].rate.std_error);
        }
    }
}

TEST_CASE("rate_along_trace: invalid selections are rejected") {
    const auto c = rate::pam_uniform(2, 1.0, 0.5, 0.5);
    const auto rc = test_config(5000, 17);
    channel::ChannelTrace trace;
    trace.sample_rate = 100.0;
    trace.gains.assign(2, Eigen::MatrixXd::Constant(1, 1, 1e-6));
    rate::TraceRateOptions opts;
    opts.pd_indices = {3};
    CHECK_THROWS_AS(rate::rate_along_trace(trace, opts, c, rc), std::out_of_range);
}

TEST_CASE("rate config validation") {
    RateConfig rc;
    rc.mc_samples = 10;
    CHECK_THROWS_AS(rc.validate(), std::invalid_argument);
    rc = RateConfig{};
    rc.noise_var = 0.0;
    CHECK_THROWS_AS(rc.validate(), std::invalid_argument);
}
