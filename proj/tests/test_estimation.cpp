// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lifi/estimation.hpp"
#include "support/oracles.hpp"

using namespace lifi;
using estimation::PilotConstraints;
using estimation::PilotDesign;

namespace {

PilotConstraints constraints(std::size_t length, double peak, double average) {
    PilotConstraints c;
    c.length = length;
    c.peak = peak;
    c.average = average;
    return c;
}

} // namespace

TEST_CASE("ls_estimate: noiseless scaling recovers the factor") {
    Eigen::VectorXd s(4);
    s << 1.0, 2.0, 0.5, 1.5;
    CHECK(estimation::ls_estimate(2.0 * s, s) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("ls_estimate: orthogonal residual is projected away") {
    Eigen::VectorXd s(2), r(2);
    s << 1.0, 1.0;
    r << 1.0, -1.0; // orthogonal to s
    CHECK(estimation::ls_estimate(s + 5.0 * r, s) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("ls_estimate: zero pilot is a domain error") {
    const Eigen::VectorXd z = Eigen::VectorXd::Zero(3);
    CHECK_THROWS_AS(estimation::ls_estimate(z, z), std::domain_error);
}

TEST_CASE("ls_estimate: Gaussian sampling statistics match LS theory") {
    const double h = 5e-6;
    const double sigma = 1e-7;
    const std::size_t trials = 10000;
    Eigen::VectorXd s(16);
    rng::Generator setup(51);
    for (int i = 0; i < 16; ++i) s[i] = 0.5 + setup.uniform01();

    rng::Generator gen(52);
    oracles::Welford stats;
    for (std::size_t t = 0; t < trials; ++t) {
        Eigen::VectorXd y(16);
        for (int i = 0; i < 16; ++i) y[i] = h * s[i] + sigma * gen.normal();
        stats.add(estimation::ls_estimate(y, s));
    }
    const double theory_var = sigma * sigma / s.squaredNorm();
    const double se_mean = std::sqrt(theory_var / static_cast<double>(trials));
    CHECK(std::abs(stats.mean - h) < 3.0 * se_mean);
    CHECK(stats.variance() == doctest::Approx(theory_var).epsilon(0.10));
}

TEST_CASE("design_pilot: L=4 peak 1 average 0.5 is two full slots") {
    const auto d = estimation::design_pilot(constraints(4, 1.0, 0.5));
    REQUIRE(d.amplitudes.size() == 4);
    CHECK(d.amplitudes[0] == 1.0);
    CHECK(d.amplitudes[1] == 1.0);
    CHECK(d.amplitudes[2] == 0.0);
    CHECK(d.amplitudes[3] == 0.0);
    CHECK(d.amplitudes.squaredNorm() == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(d.noise_var_factor == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("design_pilot: L=3 peak 2 average 1 keeps one fractional slot") {
    const auto d = estimation::design_pilot(constraints(3, 2.0, 1.0));
    CHECK(d.amplitudes[0] == 2.0);
    CHECK(d.amplitudes[1] == 1.0);
    CHECK(d.amplitudes[2] == 0.0);
    CHECK(d.amplitudes.squaredNorm() == doctest::Approx(5.0).epsilon(1e-12));
}

TEST_CASE("design_pilot: L=1 is pinned by the mean constraint") {
    const auto d = estimation::design_pilot(constraints(1, 1.0, 0.3));
    CHECK(d.amplitudes[0] == doctest::Approx(0.3).epsilon(1e-15));
    CHECK(d.decoder[0] == doctest::Approx(1.0 / 0.3).epsilon(1e-12));
}

TEST_CASE("design_pilot: infeasible averages are rejected") {
    CHECK_THROWS_AS(estimation::design_pilot(constraints(4, 1.0, 1.5)), Error);
    try {
        estimation::design_pilot(constraints(4, 1.0, 1.5));
    } catch (const Error& e) {
        CHECK(e.code() == Errc::infeasible);
    }
}

TEST_CASE("design_pilot: feasibility and the zero-forcing identity hold everywhere") {
    rng::Generator gen(53);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t length = 1 + gen.below(12);
        const double peak = 0.2 + 2.0 * gen.uniform01();
        const double average = peak * (0.05 + 0.95 * gen.uniform01());
        const auto d = estimation::design_pilot(constraints(length, peak, average));

        REQUIRE(d.amplitudes.size() == static_cast<Eigen::Index>(length));
        REQUIRE((d.amplitudes.array() >= -1e-9).all());
        REQUIRE((d.amplitudes.array() <= peak + 1e-9).all());
        REQUIRE(d.amplitudes.mean() == doctest::Approx(average).epsilon(1e-9));
        REQUIRE(d.decoder.dot(d.amplitudes) == doctest::Approx(1.0).epsilon(1e-12));
        REQUIRE(d.noise_var_factor ==
                doctest::Approx(1.0 / d.amplitudes.squaredNorm()).epsilon(1e-12));
    }
}

TEST_CASE("design_pilot: never below the grid oracle for small pilot lengths") {
    const double step = 0.05;
    rng::Generator gen(54);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t length = 1 + gen.below(5);
        const double peak = step * static_cast<double>(4 + gen.below(37)); // 0.2 .. 2.0
        // Grid-representable average: L * avg must be a multiple of the step.
        const long avg_units = 1 + static_cast<long>(gen.below(
            static_cast<std::uint64_t>(std::llround(peak / step)) * length));
        const double average = static_cast<double>(avg_units) * step / static_cast<double>(length);
        if (average > peak) continue;

        const auto design = estimation::design_pilot(constraints(length, peak, average));
        const double oracle =
            estimation::pilot_grid_oracle(constraints(length, peak, average), step);
        REQUIRE(design.amplitudes.squaredNorm() >= oracle - 1e-9);
    }
}

TEST_CASE("pilot_grid_oracle: hand-checked cases and guards") {
    CHECK(estimation::pilot_grid_oracle(constraints(2, 1.0, 0.5), 0.05) ==
          doctest::Approx(1.0).epsilon(1e-12)); // [1, 0] beats [0.5, 0.5]
    CHECK(estimation::pilot_grid_oracle(constraints(1, 1.0, 0.3), 0.05) ==
          doctest::Approx(0.09).epsilon(1e-12));
    CHECK_THROWS_AS(estimation::pilot_grid_oracle(constraints(7, 1.0, 0.5), 0.05),
                    std::invalid_argument);
    // 0.512 * 3 is not on the 0.05 grid.
    CHECK_THROWS_AS(estimation::pilot_grid_oracle(constraints(3, 1.0, 0.512), 0.05), Error);
}

TEST_CASE("zf_estimate: noiseless pilot returns the channel exactly") {
    const auto d = estimation::design_pilot(constraints(3, 2.0, 1.0));
    const double h = 7.96e-6;
    const Eigen::VectorXd y = h * d.amplitudes;
    CHECK(estimation::zf_estimate(y, d) == doctest::Approx(h).epsilon(1e-12));
    CHECK(estimation::zf_estimate(Eigen::VectorXd::Zero(3), d) == 0.0);
}

TEST_CASE("zf_estimate: empirical variance matches sigma^2 over the pilot energy") {
    const auto d = estimation::design_pilot(constraints(16, 1.0, 0.5));
    const double h = 7.96e-6;
    const double sigma = 1e-6;
    rng::Generator gen(55);
    oracles::Welford stats;
    for (int t = 0; t < 10000; ++t) {
        Eigen::VectorXd y(16);
        for (int i = 0; i < 16; ++i) y[i] = h * d.amplitudes[i] + sigma * gen.normal();
        stats.add(estimation::zf_estimate(y, d));
    }
    CHECK(stats.variance() ==
          doctest::Approx(sigma * sigma * d.noise_var_factor).epsilon(0.10));
    CHECK(std::abs(stats.mean - h) <
          3.0 * std::sqrt(sigma * sigma * d.noise_var_factor / 10000.0));
}

TEST_CASE("optimal pilot beats the uniform pilot whenever it can") {
    rng::Generator gen(56);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t length = 2 + gen.below(10);
        const double peak = 0.5 + gen.uniform01();
        const double average = peak * (0.1 + 0.8 * gen.uniform01());
        const auto optimal = estimation::design_pilot(constraints(length, peak, average));
        const auto uniform = estimation::uniform_pilot(constraints(length, peak, average));
        REQUIRE(optimal.noise_var_factor < uniform.noise_var_factor);
    }
    // With average == peak the bang-bang and flat pilots coincide.
    const auto tight_opt = estimation::design_pilot(constraints(4, 1.0, 1.0));
    const auto tight_uni = estimation::uniform_pilot(constraints(4, 1.0, 1.0));
    CHECK(tight_opt.noise_var_factor == doctest::Approx(tight_uni.noise_var_factor));
}
