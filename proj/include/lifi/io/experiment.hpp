// SPDX-License-Identifier: Apache-2.0
//
// End-to-end pipelines behind the CLI subcommands. Each run resolves its
// configuration, derives per-stage sub-seeds from the global seed, writes its
// data outputs, and finishes with a manifest.

#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "lifi/coherence.hpp"
#include "lifi/estimation.hpp"
#include "lifi/geometry.hpp"
#include "lifi/io/manifest.hpp"
#include "lifi/neural/cdrn.hpp"
#include "lifi/neural/tracker.hpp"
#include "lifi/rate.hpp"

namespace lifi::io {

enum class Command { simulate, coherence, rate, estimate, denoise, track };

const char* command_name(Command c);

struct SimulateParams {
    geometry::TrajectoryParams trajectory;
    std::string imu_csv;            // when set, integrate rates instead
    geometry::EulerAngles initial;  // initial angles for IMU integration
    geometry::Vec3 imu_ue_position{0.0, 0.0, 1.0};
};

struct CoherenceParams {
    coherence::CoherenceConfig cfg;
};

struct RateParams {
    rate::TraceRateOptions options;
    int levels{2};
    double peak_optical{1.0};
    double avg_optical{0.5};
    double electrical{1.0};
    double bandwidth{20e6};
    double noise_var{1e-12};
    std::size_t mc_samples{100000};
};

struct EstimateParams {
    estimation::Scheme scheme{estimation::Scheme::ls};
    estimation::PilotConstraints pilot;
    double noise_var{1e-12};
    int trials{1000};
    int led{0};
    int pd{0};
};

struct DenoiseParams {
    coherence::CoherenceConfig coh;
    estimation::PilotConstraints pilot;
    double noise_var{1e-12};
    neural::CdrnConfig cdrn;
    double eval_fraction{0.2}; // trailing pairs held out for the NMSE report
    int led{0};
    int pd{0};
};

struct TrackParams {
    neural::TrackerConfig cfg;
    neural::TrackerKind kind{neural::TrackerKind::lstm};
    int led{0};
    int pd{0};
};

struct ExperimentSpec {
    Command command{Command::simulate};
    std::string scenario_path; // empty: built-in default scenario
    std::string trace_path;    // input channel trace CSV
    std::string out_dir{"out"};
    std::uint64_t seed{0};
    std::variant<SimulateParams, CoherenceParams, RateParams, EstimateParams, DenoiseParams,
                 TrackParams>
        params{SimulateParams{}};
};

// Executes the pipeline, writes outputs under spec.out_dir, and returns the
// manifest (also written as manifest.json). Throws lifi::Error or standard
// exceptions on failure; no manifest is written in that case.
RunManifest run(const ExperimentSpec& spec);

} // namespace lifi::io
