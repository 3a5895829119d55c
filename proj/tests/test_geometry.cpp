// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Geometry>
#include <cmath>

#include "lifi/geometry.hpp"
#include "support/oracles.hpp"

using namespace lifi;
using geometry::EulerAngles;
using geometry::ImuSample;
using geometry::Mat3;
using geometry::Vec3;

namespace {

EulerAngles angles_of(double a, double b, double g) { return EulerAngles{a, b, g, 0.0}; }

// Independent composition through Eigen's axis-angle rotations.
Mat3 reference_rotation(double a, double b, double g) {
    return (Eigen::AngleAxisd(a, Vec3::UnitZ()) * Eigen::AngleAxisd(b, Vec3::UnitX()) *
            Eigen::AngleAxisd(g, Vec3::UnitY()))
        .toRotationMatrix();
}

} // namespace

TEST_CASE("rotation_matrix: zero angles give the identity") {
    const Mat3 r = geometry::rotation_matrix(angles_of(0, 0, 0));
    CHECK((r - Mat3::Identity()).cwiseAbs().maxCoeff() == doctest::Approx(0.0).epsilon(1e-15));
}

TEST_CASE("rotation_matrix: 90 degrees about X maps +Z to -Y") {
    const Mat3 r = geometry::rotation_matrix(angles_of(0.0, kPi / 2.0, 0.0));
    const Vec3 v = r * Vec3(0, 0, 1);
    CHECK(v.x() == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(v.y() == doctest::Approx(-1.0).epsilon(1e-12));
    CHECK(v.z() == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
}

TEST_CASE("rotation_matrix: orthogonal with unit determinant on random angles") {
    rng::Generator gen(11);
    for (int i = 0; i < 10000; ++i) {
        const double a = (gen.uniform01() - 0.5) * 4.0 * kPi;
        const double b = (gen.uniform01() - 0.5) * 4.0 * kPi;
        const double g = (gen.uniform01() - 0.5) * 4.0 * kPi;
        const Mat3 r = geometry::rotation_matrix(angles_of(a, b, g));
        REQUIRE((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
        REQUIRE(std::abs(r.determinant() - 1.0) < 1e-12);
    }
}

TEST_CASE("rotation_matrix: matches an independently composed rotation") {
    rng::Generator gen(12);
    for (int i = 0; i < 1000; ++i) {
        const double a = (gen.uniform01() - 0.5) * 4.0 * kPi;
        const double b = (gen.uniform01() - 0.5) * 4.0 * kPi;
        const double g = (gen.uniform01() - 0.5) * 4.0 * kPi;
        const Mat3 r = geometry::rotation_matrix(angles_of(a, b, g));
        REQUIRE((r - reference_rotation(a, b, g)).cwiseAbs().maxCoeff() < 1e-12);
    }
    const Mat3 spot = geometry::rotation_matrix(angles_of(kPi / 3.0, 0.4, -0.2));
    CHECK((spot.transpose() * spot - Mat3::Identity()).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(spot.determinant() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("rotation_matrix: rejects non-finite angles") {
    CHECK_THROWS_AS(geometry::rotation_matrix(angles_of(std::nan(""), 0, 0)),
                    std::invalid_argument);
}

TEST_CASE("pd_normal: identity keeps the initial normal") {
    const Vec3 n = geometry::pd_normal(angles_of(0, 0, 0), Vec3(0, 0, 1));
    CHECK((n - Vec3(0, 0, 1)).norm() < 1e-15);
}

TEST_CASE("pd_normal: beta = pi/2 maps +Z to -Y") {
    const Vec3 n = geometry::pd_normal(angles_of(0.0, kPi / 2.0, 0.0), Vec3(0, 0, 1));
    CHECK((n - Vec3(0, -1, 0)).norm() < 1e-12);
}

TEST_CASE("pd_normal: non-unit initial normal is rejected") {
    CHECK_THROWS_AS(geometry::pd_normal(angles_of(0, 0, 0), Vec3(0, 0, 2)),
                    std::invalid_argument);
}

TEST_CASE("pd_normal: norm preserved on random unit vectors") {
    rng::Generator gen(13);
    for (int i = 0; i < 10000; ++i) {
        Vec3 v(gen.normal(), gen.normal(), gen.normal());
        if (v.norm() < 1e-6) continue;
        v.normalize();
        const Vec3 n = geometry::pd_normal(
            angles_of(gen.normal(), gen.normal(), gen.normal()), v);
        REQUIRE(std::abs(n.norm() - 1.0) < 1e-9);
    }
}

TEST_CASE("pd_position: identity angles return the initial position") {
    const Vec3 p = geometry::pd_position(angles_of(0, 0, 0), Vec3(1, 2, 3), Vec3(4, 5, 6));
    CHECK((p - Vec3(4, 5, 6)).norm() < 1e-15);
}

TEST_CASE("pd_position: zero offset is rotation invariant") {
    const Vec3 u(0.3, -0.7, 1.1);
    const Vec3 p = geometry::pd_position(angles_of(1.0, -2.0, 0.5), u, u);
    CHECK((p - u).norm() < 1e-15);
}

TEST_CASE("pd_position: half turn about Z mirrors the XY offset") {
    const Vec3 p = geometry::pd_position(angles_of(kPi, 0, 0), Vec3(0, 0, 1), Vec3(0.05, 0, 1));
    CHECK(p.x() == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(std::abs(p.y()) < 1e-12);
    CHECK(p.z() == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("integrate_imu: constant rate accumulates linearly") {
    std::vector<ImuSample> samples;
    for (int i = 0; i <= 1000; ++i) {
        samples.push_back({static_cast<double>(i) / 1000.0, Vec3(0, 0, kPi / 2.0)});
    }
    const auto trace = geometry::integrate_imu(samples, EulerAngles{}, 1000.0);
    CHECK(trace.samples.back().angles.alpha == doctest::Approx(kPi / 2.0).epsilon(1e-6));
    CHECK(trace.samples.back().angles.beta == doctest::Approx(0.0).scale(1.0));
}

TEST_CASE("integrate_imu: zero rates keep the initial angles everywhere") {
    std::vector<ImuSample> samples{{0.0, Vec3::Zero()}, {0.5, Vec3::Zero()}, {1.0, Vec3::Zero()}};
    const EulerAngles initial{0.1, -0.2, 0.3, 0.0};
    const auto trace = geometry::integrate_imu(samples, initial, 100.0);
    for (const auto& s : trace.samples) {
        REQUIRE(s.angles.alpha == doctest::Approx(0.1).epsilon(1e-15));
        REQUIRE(s.angles.beta == doctest::Approx(-0.2).epsilon(1e-15));
        REQUIRE(s.angles.gamma == doctest::Approx(0.3).epsilon(1e-15));
    }
}

TEST_CASE("integrate_imu: sine rate matches the analytic integral") {
    std::vector<ImuSample> samples;
    const double dt = 1e-4;
    for (double t = 0.0; t <= kPi + dt / 2.0; t += dt) {
        samples.push_back({t, Vec3(std::sin(t), 0, 0)});
    }
    const auto trace = geometry::integrate_imu(samples, EulerAngles{}, 1.0 / dt);
    CHECK(trace.samples.back().angles.beta == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("integrate_imu: rejects unsorted and duplicate time stamps") {
    std::vector<ImuSample> bad{{0.0, Vec3::Zero()}, {0.2, Vec3::Zero()}, {0.1, Vec3::Zero()}};
    CHECK_THROWS_AS(geometry::integrate_imu(bad, EulerAngles{}, 100.0), std::invalid_argument);
    std::vector<ImuSample> dup{{0.0, Vec3::Zero()}, {0.1, Vec3::Zero()}, {0.1, Vec3::Zero()}};
    CHECK_THROWS_AS(geometry::integrate_imu(dup, EulerAngles{}, 100.0), std::invalid_argument);
}

TEST_CASE("integrate_imu: first-order error halves when the rate doubles") {
    // Rates are the exact derivative of beta(t) = sin(t) on [0, 2].
    auto end_error = [](double fs) {
        std::vector<ImuSample> samples;
        const double dt = 1.0 / fs;
        for (double t = 0.0; t <= 2.0 + dt / 2.0; t += dt) {
            samples.push_back({t, Vec3(std::cos(t), 0, 0)});
        }
        const auto trace = geometry::integrate_imu(samples, EulerAngles{}, fs);
        return std::abs(trace.samples.back().angles.beta - std::sin(2.0));
    };
    const double coarse = end_error(500.0);
    const double fine = end_error(1000.0);
    CHECK(fine < coarse);
    CHECK(fine / coarse == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("make_trajectory: zero-variance sitting model is constant") {
    geometry::TrajectoryParams p;
    p.kind = geometry::TrajectoryKind::sitting;
    p.duration = 1.0;
    p.sample_rate = 100.0;
    p.angles.stddev = 0.0;
    const auto trace = geometry::make_trajectory(p, 3);
    REQUIRE(trace.samples.size() == 100);
    for (const auto& s : trace.samples) {
        REQUIRE(s.angles.beta == doctest::Approx(p.angles.mean_beta).epsilon(1e-15));
        REQUIRE((s.ue_position - p.start).norm() < 1e-15);
    }
}

TEST_CASE("make_trajectory: walking displacement is speed times duration") {
    geometry::TrajectoryParams p;
    p.kind = geometry::TrajectoryKind::walking;
    p.duration = 10.0;
    p.sample_rate = 100.0;
    p.speed = 0.6;
    p.start = Vec3(0, 0, 1);
    p.end = Vec3(5, 0, 1);
    const auto trace = geometry::make_trajectory(p, 3);
    const double t_last = trace.samples.back().angles.t;
    const Vec3 d = trace.samples.back().ue_position - p.start;
    CHECK(d.norm() == doctest::Approx(0.6 * t_last).epsilon(1e-9));
    // Displacement over the full 10 s horizon (one step past the last slot).
    CHECK(0.6 * 10.0 == doctest::Approx(d.norm() + 0.6 / p.sample_rate).epsilon(1e-9));
    CHECK(d.normalized().isApprox(Vec3(1, 0, 0), 1e-12));
}

TEST_CASE("make_trajectory: pure function of parameters and seed") {
    geometry::TrajectoryParams p;
    p.duration = 2.0;
    p.sample_rate = 250.0;
    const auto a = geometry::make_trajectory(p, 42);
    const auto b = geometry::make_trajectory(p, 42);
    REQUIRE(a.samples.size() == b.samples.size());
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        REQUIRE(a.samples[i].angles.alpha == b.samples[i].angles.alpha);
        REQUIRE(a.samples[i].angles.beta == b.samples[i].angles.beta);
        REQUIRE(a.samples[i].angles.gamma == b.samples[i].angles.gamma);
        REQUIRE(a.samples[i].ue_position == b.samples[i].ue_position);
    }
    const auto c = geometry::make_trajectory(p, 43);
    bool any_diff = false;
    for (std::size_t i = 0; i < a.samples.size(); ++i) {
        if (a.samples[i].angles.beta != c.samples[i].angles.beta) any_diff = true;
    }
    CHECK(any_diff);
}

TEST_CASE("make_trajectory: invalid parameters are rejected") {
    geometry::TrajectoryParams p;
    p.duration = -1.0;
    CHECK_THROWS_AS(geometry::make_trajectory(p, 0), std::invalid_argument);
    p.duration = 1.0;
    p.kind = geometry::TrajectoryKind::walking;
    p.speed = 0.0;
    CHECK_THROWS_AS(geometry::make_trajectory(p, 0), std::invalid_argument);
}

TEST_CASE("pose trace validation catches non-uniform spacing") {
    geometry::PoseTrace trace;
    trace.sample_rate = 100.0;
    trace.samples.resize(3);
    trace.samples[0].angles.t = 0.0;
    trace.samples[1].angles.t = 0.01;
    trace.samples[2].angles.t = 0.03;
    CHECK_THROWS_AS(trace.validate(), std::invalid_argument);
}
