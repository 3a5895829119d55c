// SPDX-License-Identifier: Apache-2.0
//
// lifisim: simulate mobile LiFi channel traces and analyze them
// (coherence, M-PAM rates, pilot estimation, CDRN denoising, LSTM tracking).

#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "lifi/io/experiment.hpp"
#include "lifi/io/scenario.hpp"

namespace {

using namespace lifi;

void report_error(Errc code, const std::string& what) {
    std::fprintf(stderr, "LIFI_ERROR code=%d kind=%s msg=\"%s\"\n", static_cast<int>(code),
                 errc_name(code), what.c_str());
}

int run_spec(const io::ExperimentSpec& spec) {
    try {
        const auto manifest = io::run(spec);
        std::printf("%s: wrote %zu file(s) to %s (%.3f s)\n", manifest.command.c_str(),
                    manifest.outputs.size() + 1, spec.out_dir.c_str(), manifest.duration_s);
        return 0;
    } catch (const Error& e) {
        report_error(e.code(), e.what());
        return static_cast<int>(e.code());
    } catch (const std::invalid_argument& e) {
        report_error(Errc::config, e.what());
        return static_cast<int>(Errc::config);
    } catch (const std::domain_error& e) {
        report_error(Errc::config, e.what());
        return static_cast<int>(Errc::config);
    } catch (const std::out_of_range& e) {
        report_error(Errc::config, e.what());
        return static_cast<int>(Errc::config);
    } catch (const std::exception& e) {
        report_error(Errc::internal, e.what());
        return static_cast<int>(Errc::internal);
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mobile LiFi channel simulation and analysis toolkit"};
    app.require_subcommand(1);

    io::ExperimentSpec spec;
    app.add_option("--scenario", spec.scenario_path, "scenario JSON file (default: built-in)");
    app.add_option("--trace", spec.trace_path, "input channel trace CSV");
    app.add_option("--out", spec.out_dir, "output directory")->capture_default_str();
    app.add_option("--seed", spec.seed, "global seed; per-stage sub-seeds are derived from it")
        ->capture_default_str();

    // simulate ---------------------------------------------------------
    auto* sim = app.add_subcommand("simulate", "generate a pose trace and its channel trace");
    io::SimulateParams sim_params;
    std::string traj_kind = "sitting";
    double mean_beta_deg = 40.0, angle_std_deg = 5.0, reversion_s = 1.0;
    std::vector<double> start{0.0, 0.0, 1.0}, end{1.0, 0.0, 1.0}, imu_ue{0.0, 0.0, 1.0};
    double initial_alpha = 0.0, initial_beta = 0.0, initial_gamma = 0.0;
    sim->add_option("--kind", traj_kind, "sitting|walking")->capture_default_str();
    sim->add_option("--duration", sim_params.trajectory.duration, "trace duration, s")
        ->capture_default_str();
    sim->add_option("--fs", sim_params.trajectory.sample_rate, "sample rate, Hz")
        ->capture_default_str();
    sim->add_option("--speed", sim_params.trajectory.speed, "walking speed, m/s")
        ->capture_default_str();
    sim->add_option("--start", start, "UE start position, m")->expected(3);
    sim->add_option("--end", end, "walking heading point, m")->expected(3);
    sim->add_option("--mean-beta-deg", mean_beta_deg, "mean roll angle, deg")
        ->capture_default_str();
    sim->add_option("--angle-std-deg", angle_std_deg, "angle fluctuation std, deg")
        ->capture_default_str();
    sim->add_option("--angle-reversion", reversion_s, "angle mean-reversion time, s")
        ->capture_default_str();
    sim->add_option("--imu-csv", sim_params.imu_csv,
                    "integrate gyroscope rates from this CSV instead of the synthetic model");
    sim->add_option("--initial-alpha", initial_alpha, "IMU integration initial alpha, rad");
    sim->add_option("--initial-beta", initial_beta, "IMU integration initial beta, rad");
    sim->add_option("--initial-gamma", initial_gamma, "IMU integration initial gamma, rad");
    sim->add_option("--imu-ue", imu_ue, "UE position for IMU traces, m")->expected(3);

    // coherence --------------------------------------------------------
    auto* coh = app.add_subcommand("coherence", "autocorrelation, coherence time, and CDF");
    io::CoherenceParams coh_params;
    std::string outage_policy = "zero";
    coh->add_option("--eta-th", coh_params.cfg.eta_th, "coherence threshold")
        ->capture_default_str();
    coh->add_option("--max-lag", coh_params.cfg.max_lag, "largest lag to evaluate, slots")
        ->capture_default_str();
    coh->add_option("--outage-policy", outage_policy, "zero|ignore")->capture_default_str();

    // rate ---------------------------------------------------------------
    auto* rate_cmd = app.add_subcommand("rate", "M-PAM achievable rate along a trace");
    io::RateParams rate_params;
    std::string topology = "siso", policy = "mrc";
    rate_cmd->add_option("--topology", topology, "siso|simo|miso|mimo")->capture_default_str();
    rate_cmd->add_option("--leds", rate_params.options.led_indices, "LED indices (0-based)");
    rate_cmd->add_option("--pds", rate_params.options.pd_indices, "PD indices (0-based)");
    rate_cmd->add_option("--policy", policy, "mrc|dominant|uniform")->capture_default_str();
    rate_cmd->add_option("--pam", rate_params.levels, "constellation size M")
        ->capture_default_str();
    rate_cmd->add_option("--bandwidth", rate_params.bandwidth, "bandwidth B, Hz")
        ->capture_default_str();
    rate_cmd->add_option("--sigma2", rate_params.noise_var, "noise variance")
        ->capture_default_str();
    rate_cmd->add_option("--mc-samples", rate_params.mc_samples, "Monte Carlo draws")
        ->capture_default_str();
    rate_cmd->add_option("--peak", rate_params.peak_optical, "instantaneous optical cap")
        ->capture_default_str();
    rate_cmd->add_option("--avg", rate_params.avg_optical, "average optical cap")
        ->capture_default_str();
    rate_cmd->add_option("--electrical", rate_params.electrical, "electrical power cap")
        ->capture_default_str();

    // estimate -----------------------------------------------------------
    auto* est = app.add_subcommand("estimate", "pilot-based LS / ZF-coding estimation trials");
    io::EstimateParams est_params;
    std::string scheme = "ls";
    est->add_option("--scheme", scheme, "ls|zf")->capture_default_str();
    est->add_option("--pilot-length", est_params.pilot.length, "pilot length L")
        ->capture_default_str();
    est->add_option("--rho-hat", est_params.pilot.peak, "per-slot optical peak")
        ->capture_default_str();
    est->add_option("--phi-hat", est_params.pilot.average, "required average optical power")
        ->capture_default_str();
    est->add_option("--sigma2", est_params.noise_var, "noise variance")->capture_default_str();
    est->add_option("--trials", est_params.trials, "number of trials")->capture_default_str();
    est->add_option("--led", est_params.led, "LED index")->capture_default_str();
    est->add_option("--pd", est_params.pd, "PD index")->capture_default_str();

    // denoise --------------------------------------------------------------
    auto* den = app.add_subcommand("denoise", "train and evaluate the CDRN denoiser");
    io::DenoiseParams den_params;
    den->add_option("--eta-th", den_params.coh.eta_th, "coherence threshold")
        ->capture_default_str();
    den->add_option("--max-lag", den_params.coh.max_lag, "largest coherence lag, slots")
        ->capture_default_str();
    den->add_option("--pilot-length", den_params.pilot.length, "pilot length L")
        ->capture_default_str();
    den->add_option("--rho-hat", den_params.pilot.peak, "per-slot optical peak")
        ->capture_default_str();
    den->add_option("--phi-hat", den_params.pilot.average, "average optical power")
        ->capture_default_str();
    den->add_option("--sigma2", den_params.noise_var, "noise variance")->capture_default_str();
    den->add_option("--blocks", den_params.cdrn.blocks, "denoising blocks D")
        ->capture_default_str();
    den->add_option("--layers", den_params.cdrn.layers_per_block, "layers per block")
        ->capture_default_str();
    den->add_option("--filters", den_params.cdrn.filters, "filters per conv layer")
        ->capture_default_str();
    den->add_option("--kernel", den_params.cdrn.kernel, "conv kernel size (odd)")
        ->capture_default_str();
    den->add_option("--lr", den_params.cdrn.learning_rate, "learning rate")
        ->capture_default_str();
    den->add_option("--epochs", den_params.cdrn.epochs, "training epochs")->capture_default_str();
    den->add_option("--batch", den_params.cdrn.batch_size, "batch size")->capture_default_str();
    den->add_option("--eval-fraction", den_params.eval_fraction, "held-out pair fraction")
        ->capture_default_str();
    den->add_option("--led", den_params.led, "LED index")->capture_default_str();
    den->add_option("--pd", den_params.pd, "PD index")->capture_default_str();

    // track ---------------------------------------------------------------
    auto* trk = app.add_subcommand("track", "LSTM/RNN one-step-ahead channel tracking");
    io::TrackParams trk_params;
    std::string kind = "lstm";
    trk->add_option("--kind", kind, "lstm|rnn")->capture_default_str();
    trk->add_option("--hidden", trk_params.cfg.hidden, "hidden size")->capture_default_str();
    trk->add_option("--time-step", trk_params.cfg.window, "input window length")
        ->capture_default_str();
    trk->add_option("--lr", trk_params.cfg.learning_rate, "learning rate")->capture_default_str();
    trk->add_option("--iterations", trk_params.cfg.iterations, "training epochs")
        ->capture_default_str();
    trk->add_option("--train-fraction", trk_params.cfg.train_fraction, "training split")
        ->capture_default_str();
    trk->add_flag("--shared-gate-weights", trk_params.cfg.shared_gate_weights,
                  "single weight matrix per gate (literal cell equations)");
    trk->add_option("--led", trk_params.led, "LED index")->capture_default_str();
    trk->add_option("--pd", trk_params.pd, "PD index")->capture_default_str();

    // write-scenario --------------------------------------------------------
    auto* ws = app.add_subcommand("write-scenario", "write the built-in default scenario JSON");
    std::string scenario_out = "scenario.json";
    ws->add_option("--file", scenario_out, "target path")->capture_default_str();

    CLI11_PARSE(app, argc, argv);

    if (ws->parsed()) {
        try {
            io::save_scenario(scenario_out, io::default_scenario());
            std::printf("wrote %s\n", scenario_out.c_str());
            return 0;
        } catch (const std::exception& e) {
            report_error(Errc::internal, e.what());
            return static_cast<int>(Errc::internal);
        }
    }

    try {
        if (sim->parsed()) {
            if (traj_kind == "sitting") {
                sim_params.trajectory.kind = geometry::TrajectoryKind::sitting;
            } else if (traj_kind == "walking") {
                sim_params.trajectory.kind = geometry::TrajectoryKind::walking;
            } else {
                throw Error(Errc::config, "unknown trajectory kind: " + traj_kind);
            }
            sim_params.trajectory.start = geometry::Vec3(start[0], start[1], start[2]);
            sim_params.trajectory.end = geometry::Vec3(end[0], end[1], end[2]);
            sim_params.imu_ue_position = geometry::Vec3(imu_ue[0], imu_ue[1], imu_ue[2]);
            sim_params.trajectory.angles.mean_beta = deg2rad(mean_beta_deg);
            sim_params.trajectory.angles.stddev = deg2rad(angle_std_deg);
            sim_params.trajectory.angles.reversion_time = reversion_s;
            sim_params.initial = geometry::EulerAngles{initial_alpha, initial_beta, initial_gamma, 0.0};
            spec.command = io::Command::simulate;
            spec.params = sim_params;
        } else if (coh->parsed()) {
            if (outage_policy == "zero") {
                coh_params.cfg.outage_policy = coherence::OutagePolicy::zero_if_any_outage;
            } else if (outage_policy == "ignore") {
                coh_params.cfg.outage_policy = coherence::OutagePolicy::ignore_outage;
            } else {
                throw Error(Errc::config, "unknown outage policy: " + outage_policy);
            }
            spec.command = io::Command::coherence;
            spec.params = coh_params;
        } else if (rate_cmd->parsed()) {
            if (topology == "siso") rate_params.options.topology = rate::Topology::siso;
            else if (topology == "simo") rate_params.options.topology = rate::Topology::simo;
            else if (topology == "miso") rate_params.options.topology = rate::Topology::miso;
            else if (topology == "mimo") rate_params.options.topology = rate::Topology::mimo;
            else throw Error(Errc::config, "unknown topology: " + topology);
            if (policy == "mrc") rate_params.options.policy = rate::BeamformerPolicy::mrc;
            else if (policy == "dominant")
                rate_params.options.policy = rate::BeamformerPolicy::dominant_singular;
            else if (policy == "uniform")
                rate_params.options.policy = rate::BeamformerPolicy::uniform;
            else throw Error(Errc::config, "unknown beamforming policy: " + policy);
            spec.command = io::Command::rate;
            spec.params = rate_params;
        } else if (est->parsed()) {
            if (scheme == "ls") est_params.scheme = estimation::Scheme::ls;
            else if (scheme == "zf") est_params.scheme = estimation::Scheme::zf_coding;
            else throw Error(Errc::config, "unknown estimation scheme: " + scheme);
            spec.command = io::Command::estimate;
            spec.params = est_params;
        } else if (den->parsed()) {
            spec.command = io::Command::denoise;
            spec.params = den_params;
        } else if (trk->parsed()) {
            if (kind == "lstm") trk_params.kind = neural::TrackerKind::lstm;
            else if (kind == "rnn") trk_params.kind = neural::TrackerKind::rnn;
            else throw Error(Errc::config, "unknown tracker kind: " + kind);
            spec.command = io::Command::track;
            spec.params = trk_params;
        }
    } catch (const Error& e) {
        report_error(e.code(), e.what());
        return static_cast<int>(e.code());
    }

    return run_spec(spec);
}
