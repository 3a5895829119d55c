// SPDX-License-Identifier: Apache-2.0

#include "lifi/geometry.hpp"

#include <cmath>
#include <cstdlib>

#include "lifi/rng.hpp"

namespace lifi::geometry {

namespace {

void require_finite(const EulerAngles& a) {
    if (!std::isfinite(a.alpha) || !std::isfinite(a.beta) || !std::isfinite(a.gamma)) {
        throw std::invalid_argument("rotation angles must be finite");
    }
}

} // namespace

void PoseTrace::validate() const {
    if (samples.empty()) throw std::invalid_argument("pose trace is empty");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("pose trace sample rate must be positive");
    const double dt = 1.0 / sample_rate;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double step = samples[i].angles.t - samples[i - 1].angles.t;
        if (std::abs(step - dt) > 1e-9) {
            throw std::invalid_argument("pose trace time stamps are not uniform at 1/f_s");
        }
    }
}

Mat3 rotation_matrix(const EulerAngles& angles) {
    require_finite(angles);
    const double ca = std::cos(angles.alpha), sa = std::sin(angles.alpha);
    const double cb = std::cos(angles.beta), sb = std::sin(angles.beta);
    const double cg = std::cos(angles.gamma), sg = std::sin(angles.gamma);

    Mat3 rz, rx, ry;
    rz << ca, -sa, 0.0,
          sa,  ca, 0.0,
          0.0, 0.0, 1.0;
    rx << 1.0, 0.0, 0.0,
          0.0,  cb, -sb,
          0.0,  sb,  cb;
    ry <<  cg, 0.0,  sg,
          0.0, 1.0, 0.0,
          -sg, 0.0,  cg;
    return rz * rx * ry;
}

Vec3 pd_normal(const EulerAngles& angles, const Vec3& n_p0) {
    if (std::abs(n_p0.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("initial PD normal must be a unit vector");
    }
    return rotation_matrix(angles) * n_p0;
}

Vec3 pd_position(const EulerAngles& angles, const Vec3& u_u, const Vec3& u_p0) {
    return u_u + rotation_matrix(angles) * (u_p0 - u_u);
}

PoseTrace integrate_imu(const std::vector<ImuSample>& samples, const EulerAngles& initial,
                        double sample_rate, const Vec3& ue_position) {
    if (samples.size() < 2) throw std::invalid_argument("IMU integration needs at least two samples");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");
    for (std::size_t i = 0; i < samples.size(); ++i) {
        if (!std::isfinite(samples[i].t) || !samples[i].omega.allFinite()) {
            throw std::invalid_argument("IMU samples must be finite");
        }
        if (i > 0 && !(samples[i].t > samples[i - 1].t)) {
            throw std::invalid_argument("IMU time stamps must be strictly increasing");
        }
    }

    // Forward-Euler accumulation at the measurement knots.
    const std::size_t n = samples.size();
    std::vector<double> alpha(n), beta(n), gamma(n);
    alpha[0] = initial.alpha;
    beta[0] = initial.beta;
    gamma[0] = initial.gamma;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double dt = samples[i + 1].t - samples[i].t;
        alpha[i + 1] = alpha[i] + samples[i].omega.z() * dt;
        beta[i + 1] = beta[i] + samples[i].omega.x() * dt;
        gamma[i + 1] = gamma[i] + samples[i].omega.y() * dt;
    }

    // Resample onto a uniform grid by linear interpolation between knots.
    const double t0 = samples.front().t;
    const double t_end = samples.back().t;
    const double dt = 1.0 / sample_rate;
    const auto slots = static_cast<std::size_t>(std::floor((t_end - t0) * sample_rate + 1e-9)) + 1;

    PoseTrace trace;
    trace.sample_rate = sample_rate;
    trace.samples.reserve(slots);
    std::size_t seg = 0;
    for (std::size_t k = 0; k < slots; ++k) {
        const double t = t0 + static_cast<double>(k) * dt;
        while (seg + 2 < n && samples[seg + 1].t <= t) ++seg;
        const double span = samples[seg + 1].t - samples[seg].t;
        const double w = std::clamp((t - samples[seg].t) / span, 0.0, 1.0);
        PoseSample ps;
        ps.angles.alpha = alpha[seg] + w * (alpha[seg + 1] - alpha[seg]);
        ps.angles.beta = beta[seg] + w * (beta[seg + 1] - beta[seg]);
        ps.angles.gamma = gamma[seg] + w * (gamma[seg + 1] - gamma[seg]);
        ps.angles.t = t;
        ps.ue_position = ue_position;
        trace.samples.push_back(ps);
    }
    return trace;
}

PoseTrace make_trajectory(const TrajectoryParams& params, std::uint64_t seed) {
    if (!(params.duration > 0.0)) throw std::invalid_argument("trajectory duration must be positive");
    if (!(params.sample_rate > 0.0)) throw std::invalid_argument("trajectory sample rate must be positive");
    if (params.angles.stddev < 0.0) throw std::invalid_argument("angle stddev must be non-negative");
    if (!(params.angles.reversion_time > 0.0)) {
        throw std::invalid_argument("angle reversion time must be positive");
    }
    Vec3 heading = Vec3::Zero();
    if (params.kind == TrajectoryKind::walking) {
        if (!(params.speed > 0.0)) throw std::invalid_argument("walking requires a positive speed");
        const Vec3 delta = params.end - params.start;
        if (delta.norm() == 0.0) throw std::invalid_argument("walking requires distinct start and end points");
        heading = delta.normalized();
    }

    const double dt = 1.0 / params.sample_rate;
    const auto slots = static_cast<std::size_t>(std::llround(params.duration * params.sample_rate));
    if (slots == 0) throw std::invalid_argument("trajectory shorter than one sample");

    rng::Generator gen(seed);
    const AngleModel& am = params.angles;
    const double theta = 1.0 / am.reversion_time;
    const double step_sigma = am.stddev * std::sqrt(2.0 * theta * dt);
    const double bound = am.bound_sigmas * am.stddev;

    double dev_a = 0.0, dev_b = 0.0, dev_g = 0.0; // deviations from the mean posture
    PoseTrace trace;
    trace.sample_rate = params.sample_rate;
    trace.samples.reserve(slots);
    for (std::size_t k = 0; k < slots; ++k) {
        const double t = static_cast<double>(k) * dt;
        PoseSample ps;
        ps.angles.alpha = am.mean_alpha + dev_a;
        ps.angles.beta = am.mean_beta + dev_b;
        ps.angles.gamma = am.mean_gamma + dev_g;
        ps.angles.t = t;
        ps.ue_position = params.start;
        if (params.kind == TrajectoryKind::walking) {
            ps.ue_position += heading * (params.speed * t);
        }
        trace.samples.push_back(ps);

        auto advance = [&](double dev) {
            const double next = dev - theta * dev * dt + step_sigma * gen.normal();
            return std::clamp(next, -bound, bound);
        };
        dev_a = advance(dev_a);
        dev_b = advance(dev_b);
        dev_g = advance(dev_g);
    }
    return trace;
}

} // namespace lifi::geometry
