// SPDX-License-Identifier: Apache-2.0

#include "lifi/channel.hpp"

#include <algorithm>
#include <cmath>

namespace lifi::channel {

void PdConfig::validate() const {
    if (!(area > 0.0)) throw std::invalid_argument("PD area must be positive");
    if (!(concentrator_gain > 0.0)) throw std::invalid_argument("concentrator gain must be positive");
    if (!(fov > 0.0) || fov > kPi / 2.0 + 1e-12) {
        throw std::invalid_argument("PD FOV must lie in (0, pi/2]");
    }
    if (std::abs(n_p0.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("initial PD normal must be a unit vector");
    }
}

void LedConfig::validate() const {
    if (lambertian_order < 0.0) throw std::invalid_argument("Lambertian order must be non-negative");
    if (std::abs(n_l.norm() - 1.0) > 1e-9) {
        throw std::invalid_argument("LED normal must be a unit vector");
    }
}

void NlosParams::validate() const {
    if (rho < 0.0 || rho >= 1.0) throw std::invalid_argument("NLOS reflection coefficient must lie in [0, 1)");
    if (!(surface_area > 0.0)) throw std::invalid_argument("indoor surface area must be positive");
    if (!(cutoff_hz > 0.0)) throw std::invalid_argument("NLOS cutoff frequency must be positive");
    if (delay < 0.0) throw std::invalid_argument("NLOS delay must be non-negative");
}

void ScenarioConfig::validate() const {
    if (leds.empty()) throw std::invalid_argument("scenario needs at least one LED");
    if (pds.empty()) throw std::invalid_argument("scenario needs at least one PD");
    for (const auto& led : leds) led.validate();
    for (const auto& pd : pds) pd.validate();
    nlos.validate();
    const Vec3 half{room.x() / 2.0, room.y() / 2.0, 0.0};
    auto inside = [&](const Vec3& p) {
        return p.x() >= -half.x() - 1e-9 && p.x() <= half.x() + 1e-9 &&
               p.y() >= -half.y() - 1e-9 && p.y() <= half.y() + 1e-9 &&
               p.z() >= -1e-9 && p.z() <= room.z() + 1e-9;
    };
    for (const auto& led : leds) {
        if (!inside(led.u_l)) throw std::invalid_argument("LED position outside room bounds");
    }
    for (const auto& pd : pds) {
        if (!inside(pd.u_p0)) throw std::invalid_argument("PD position outside room bounds");
    }
}

double los_gain(const LedConfig& led, const Vec3& pd_pos, const Vec3& pd_normal, const PdConfig& pd) {
    const Vec3 led_to_pd = pd_pos - led.u_l;
    const double d = led_to_pd.norm();
    if (d == 0.0) throw std::domain_error("LED and PD positions coincide");
    const double np_norm = pd_normal.norm();
    if (np_norm == 0.0) throw std::domain_error("PD normal has zero length");

    const Vec3 dir = led_to_pd / d;
    const double cos_phi = dir.dot(led.n_l);
    if (cos_phi < 0.0) return 0.0; // PD above the emission lobe

    const double cos_psi_raw = (-dir).dot(pd_normal) / np_norm;
    const double psi = std::acos(std::clamp(cos_psi_raw, -1.0, 1.0));
    if (psi > pd.fov) return 0.0;

    const double phi = std::acos(std::clamp(cos_phi, -1.0, 1.0));
    const double m = led.lambertian_order;
    return (m + 1.0) * pd.area * pd.concentrator_gain / (2.0 * kPi * d * d) *
           std::pow(std::cos(phi), m) * std::cos(psi);
}

double los_gain_vector_form(const LedConfig& led, const Vec3& pd_pos, const Vec3& pd_normal,
                            const PdConfig& pd) {
    const Vec3 led_to_pd = pd_pos - led.u_l;
    const double d = led_to_pd.norm();
    if (d == 0.0) throw std::domain_error("LED and PD positions coincide");
    const double np_norm = pd_normal.norm();
    if (np_norm == 0.0) throw std::domain_error("PD normal has zero length");

    const double exit_dot = led_to_pd.dot(led.n_l);        // d * cos(phi)
    if (exit_dot < 0.0) return 0.0;
    const double incidence_dot = (-led_to_pd).dot(pd_normal); // d * ||n_p|| * cos(psi)
    if (incidence_dot / (d * np_norm) < std::cos(pd.fov)) return 0.0;

    const double m = led.lambertian_order;
    return (m + 1.0) * pd.area * pd.concentrator_gain * std::pow(exit_dot, m) * incidence_dot /
           (2.0 * kPi * std::pow(d, m + 3.0) * np_norm);
}

double nlos_gain(const NlosParams& nlos, const PdConfig& pd, double t) {
    if (!std::isfinite(t)) throw std::invalid_argument("time must be finite");
    if (nlos.rho >= 1.0) throw std::domain_error("NLOS reflection coefficient of 1 is singular");
    if (t < nlos.delay) return 0.0;
    const double scale = pd.area * nlos.rho / (nlos.surface_area * (1.0 - nlos.rho));
    return 2.0 * kPi * nlos.cutoff_hz * scale * std::exp(-2.0 * kPi * nlos.cutoff_hz * (t - nlos.delay));
}

double nlos_dc_gain(const NlosParams& nlos, const PdConfig& pd) {
    if (nlos.rho >= 1.0) throw std::domain_error("NLOS reflection coefficient of 1 is singular");
    return pd.area * nlos.rho / (nlos.surface_area * (1.0 - nlos.rho));
}

Eigen::MatrixXd channel_gain_matrix(const ScenarioConfig& scenario, const geometry::PoseSample& pose) {
    const auto k = static_cast<Eigen::Index>(scenario.leds.size());
    const auto n = static_cast<Eigen::Index>(scenario.pds.size());
    Eigen::MatrixXd gains(k, n);
    const geometry::Mat3 rot = geometry::rotation_matrix(pose.angles);
    for (Eigen::Index j = 0; j < n; ++j) {
        const PdConfig& pd = scenario.pds[static_cast<std::size_t>(j)];
        const Vec3 offset = pd.u_p0 - scenario.ue_reference; // body-frame PD offset
        const Vec3 pd_pos = pose.ue_position + rot * offset;
        const Vec3 pd_norm = rot * pd.n_p0;
        const double diffuse = scenario.nlos.enabled ? nlos_dc_gain(scenario.nlos, pd) : 0.0;
        for (Eigen::Index i = 0; i < k; ++i) {
            const LedConfig& led = scenario.leds[static_cast<std::size_t>(i)];
            gains(i, j) = los_gain(led, pd_pos, pd_norm, pd) + diffuse;
        }
    }
    return gains;
}

ChannelTrace sample_channel_trace(const ScenarioConfig& scenario, const geometry::PoseTrace& trace) {
    trace.validate();
    scenario.validate();
    ChannelTrace out;
    out.sample_rate = trace.sample_rate;
    out.provenance = Provenance::simulated;
    out.gains.reserve(trace.samples.size());
    for (const auto& pose : trace.samples) {
        out.gains.push_back(channel_gain_matrix(scenario, pose));
    }
    return out;
}

} // namespace lifi::channel
