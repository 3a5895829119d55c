// SPDX-License-Identifier: Apache-2.0
//
// Instantaneous LiFi channel gains: Lambertian LOS link, first-reflection
// diffuse link, and per-slot K x N gain matrices along a pose trace.

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lifi/common.hpp"
#include "lifi/geometry.hpp"

namespace lifi::channel {

using geometry::Vec3;

struct PdConfig {
    std::string id{"pd"};
    Vec3 u_p0{0.0, 0.0, 1.0};       // initial position, m
    Vec3 n_p0{0.0, 0.0, 1.0};       // initial normal (unit)
    double area{1e-4};              // A_PD, m^2
    double concentrator_gain{1.0};  // g_f
    double fov{deg2rad(60.0)};      // Psi_FOV, rad

    void validate() const;
};

struct LedConfig {
    std::string id{"led"};
    Vec3 u_l{0.0, 0.0, 3.0};
    Vec3 n_l{0.0, 0.0, -1.0}; // ceiling LED pointing straight down
    double lambertian_order{1.0};

    void validate() const;
};

struct NlosParams {
    bool enabled{false};
    double rho{0.5};           // reflection coefficient, [0, 1)
    double surface_area{1e-4}; // A_r, m^2 (reference-setup value; see README)
    double cutoff_hz{1e7};     // f_c
    double delay{0.0};         // Delta t_NLOS, s

    void validate() const;
};

struct ScenarioConfig {
    std::vector<LedConfig> leds;
    std::vector<PdConfig> pds;
    NlosParams nlos{};
    Vec3 room{4.0, 4.0, 3.0};
    // UE centre position at which the pds[i].u_p0 coordinates were recorded;
    // PD body offsets are taken relative to this point.
    Vec3 ue_reference{0.0, 0.0, 1.0};

    void validate() const;
};

enum class Provenance { simulated, ingested };

// Per-slot K x N gain matrices (rows: LEDs, columns: PDs).
struct ChannelTrace {
    std::vector<Eigen::MatrixXd> gains;
    double sample_rate{0.0};
    Provenance provenance{Provenance::simulated};
};

// Lambertian LOS gain, angle form: (m+1) A g_f / (2 pi d^2) cos^m(phi) cos(psi),
// zero outside the FOV cone or when the PD sits above the LED lobe.
double los_gain(const LedConfig& led, const Vec3& pd_pos, const Vec3& pd_normal, const PdConfig& pd);

// Same quantity computed through the vectorized expression
// (m+1) A g_f ((pd-led)^T n_l)^m ((led-pd)^T n_p) / (2 pi d^(m+3) ||n_p||);
// kept as an independent evaluation route for cross-checks.
double los_gain_vector_form(const LedConfig& led, const Vec3& pd_pos, const Vec3& pd_normal,
                            const PdConfig& pd);

// Diffuse first-reflection gain density at time t (relative to slot start):
// 2 pi f_c A_PD rho / (A_r (1 - rho)) exp(-2 pi f_c (t - delay)), zero before
// the diffuse onset.
double nlos_gain(const NlosParams& nlos, const PdConfig& pd, double t);

// Integral of nlos_gain over all time: A_PD rho / (A_r (1 - rho)).
double nlos_dc_gain(const NlosParams& nlos, const PdConfig& pd);

// K x N gain matrix at one pose. When NLOS is enabled its DC aggregate is
// added on top of the LOS gain.
Eigen::MatrixXd channel_gain_matrix(const ScenarioConfig& scenario, const geometry::PoseSample& pose);

// One gain matrix per pose sample, same sample rate.
ChannelTrace sample_channel_trace(const ScenarioConfig& scenario, const geometry::PoseTrace& trace);

} // namespace lifi::channel
