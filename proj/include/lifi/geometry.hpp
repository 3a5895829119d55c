// SPDX-License-Identifier: Apache-2.0
//
// Device orientation and trajectory: rotation matrices from Euler angles,
// PD normals/positions after rotation, gyroscope-rate integration, and
// synthetic sitting/walking pose traces.

#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "lifi/common.hpp"

namespace lifi::geometry {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Rotation angles about the Z (alpha), X (beta), and Y (gamma) axes at time t.
struct EulerAngles {
    double alpha{0.0};
    double beta{0.0};
    double gamma{0.0};
    double t{0.0};
};

// One gyroscope sample: angular rates about the X, Y, Z axes in rad/s.
struct ImuSample {
    double t{0.0};
    Vec3 omega{Vec3::Zero()};
};

struct PoseSample {
    EulerAngles angles;
    Vec3 ue_position{Vec3::Zero()};
};

// Uniformly sampled orientation + UE position series.
struct PoseTrace {
    std::vector<PoseSample> samples;
    double sample_rate{0.0}; // f_s, Hz

    // Nonempty, positive rate, time stamps uniform to within 1e-9 s.
    void validate() const;
};

// Composition R_alpha(Z) * R_beta(X) * R_gamma(Y). Orthogonal, det = 1.
Mat3 rotation_matrix(const EulerAngles& angles);

// Rotated PD normal R(t) * n_p0. n_p0 must be unit length to within 1e-9.
Vec3 pd_normal(const EulerAngles& angles, const Vec3& n_p0);

// Rotated PD position u_u + R(t) * (u_p0 - u_u).
Vec3 pd_position(const EulerAngles& angles, const Vec3& u_u, const Vec3& u_p0);

// First-order accumulation of gyroscope rates into rotation angles
// (omega_z -> alpha, omega_x -> beta, omega_y -> gamma), resampled onto a
// uniform 1/sample_rate grid by linear interpolation. The UE position is held
// fixed at ue_position for every slot.
PoseTrace integrate_imu(const std::vector<ImuSample>& samples, const EulerAngles& initial,
                        double sample_rate, const Vec3& ue_position = Vec3::Zero());

enum class TrajectoryKind { sitting, walking };

// Mean-reverting (Ornstein-Uhlenbeck style) angle fluctuation around a held
// posture. Defaults reflect a phone held tilted toward the user.
struct AngleModel {
    double mean_alpha{0.0};
    double mean_beta{deg2rad(40.0)};
    double mean_gamma{0.0};
    double stddev{deg2rad(5.0)};
    double reversion_time{1.0}; // s
    // Excursions are clamped to mean +/- bound_sigmas * stddev.
    double bound_sigmas{3.0};
};

struct TrajectoryParams {
    TrajectoryKind kind{TrajectoryKind::sitting};
    double duration{10.0};      // s
    double sample_rate{1000.0}; // Hz
    double speed{0.0};          // m/s, walking only
    Vec3 start{0.0, 0.0, 1.0};
    Vec3 end{1.0, 0.0, 1.0}; // walking heading; ignored while sitting
    AngleModel angles{};
};

// Synthetic pose trace; a pure function of (params, seed).
PoseTrace make_trajectory(const TrajectoryParams& params, std::uint64_t seed);

} // namespace lifi::geometry
