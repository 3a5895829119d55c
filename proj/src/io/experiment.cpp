// SPDX-License-Identifier: Apache-2.0

#include "lifi/io/experiment.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>

#include <json.hpp>

#include "lifi/io/csv.hpp"
#include "lifi/io/scenario.hpp"
#include "lifi/neural/checkpoint.hpp"
#include "lifi/neural/metrics.hpp"
#include "lifi/rng.hpp"

namespace lifi::io {

namespace fs = std::filesystem;
using nlohmann::json;

const char* command_name(Command c) {
    switch (c) {
        case Command::simulate: return "simulate";
        case Command::coherence: return "coherence";
        case Command::rate: return "rate";
        case Command::estimate: return "estimate";
        case Command::denoise: return "denoise";
        case Command::track: return "track";
    }
    return "simulate";
}

namespace {

struct RunContext {
    const ExperimentSpec& spec;
    RunManifest manifest;

    std::string out_path(const std::string& name) {
        manifest.outputs.push_back(name);
        return (fs::path(spec.out_dir) / name).string();
    }

    void add_input(const std::string& path) {
        if (!path.empty()) manifest.inputs.emplace_back(path, sha256_file(path));
    }
};

channel::ScenarioConfig resolve_scenario(RunContext& ctx) {
    if (ctx.spec.scenario_path.empty()) return default_scenario();
    if (!fs::exists(ctx.spec.scenario_path)) {
        throw Error(Errc::missing_file, "scenario file not found: " + ctx.spec.scenario_path);
    }
    ctx.add_input(ctx.spec.scenario_path);
    return load_scenario(ctx.spec.scenario_path);
}

channel::ChannelTrace resolve_trace(RunContext& ctx) {
    if (ctx.spec.trace_path.empty()) {
        throw Error(Errc::config, "this command needs --trace <channel trace CSV>");
    }
    if (!fs::exists(ctx.spec.trace_path)) {
        throw Error(Errc::missing_file, "trace file not found: " + ctx.spec.trace_path);
    }
    ctx.add_input(ctx.spec.trace_path);
    return read_channel_trace_csv(ctx.spec.trace_path);
}

std::vector<double> scalar_series(const channel::ChannelTrace& trace, int led, int pd) {
    if (trace.gains.empty()) throw std::invalid_argument("channel trace is empty");
    if (led < 0 || led >= trace.gains.front().rows() || pd < 0 ||
        pd >= trace.gains.front().cols()) {
        throw std::out_of_range("LED/PD selection out of range");
    }
    std::vector<double> series;
    series.reserve(trace.gains.size());
    for (const auto& g : trace.gains) series.push_back(g(led, pd));
    return series;
}

void run_simulate(RunContext& ctx, const SimulateParams& p) {
    const auto scenario = resolve_scenario(ctx);

    geometry::PoseTrace pose;
    if (!p.imu_csv.empty()) {
        if (!fs::exists(p.imu_csv)) {
            throw Error(Errc::missing_file, "IMU CSV not found: " + p.imu_csv);
        }
        ctx.add_input(p.imu_csv);
        const auto samples = read_imu_csv(p.imu_csv);
        pose = geometry::integrate_imu(samples, p.initial, p.trajectory.sample_rate,
                                       p.imu_ue_position);
    } else {
        pose = geometry::make_trajectory(p.trajectory,
                                         rng::derive_seed(ctx.spec.seed, "trajectory"));
    }

    const auto trace = channel::sample_channel_trace(scenario, pose);
    write_pose_csv(ctx.out_path("pose.csv"), pose);
    write_channel_trace_csv(ctx.out_path("trace.csv"), trace);

    ctx.manifest.config["trajectory"] = {
        {"kind", p.trajectory.kind == geometry::TrajectoryKind::sitting ? "sitting" : "walking"},
        {"duration_s", p.trajectory.duration},
        {"sample_rate_hz", p.trajectory.sample_rate},
        {"speed_m_s", p.trajectory.speed},
        {"imu_csv", p.imu_csv},
    };
}

void run_coherence(RunContext& ctx, const CoherenceParams& p) {
    const auto trace = resolve_trace(ctx);
    const auto k = trace.gains.front().rows();
    const auto n = trace.gains.front().cols();

    coherence::CoherenceConfig cfg = p.cfg;
    cfg.full_curve = true;

    Series rho_series;
    rho_series.columns = {"led", "pd", "lag", "rho"};
    Series summary;
    summary.columns = {"led", "pd", "n_c", "t_c_s", "outage", "censored"};
    std::vector<double> t_c_values;

    for (Eigen::Index i = 0; i < k; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto series = scalar_series(trace, static_cast<int>(i), static_cast<int>(j));
            const auto result = coherence::coherence_time(series, trace.sample_rate, cfg);
            for (std::size_t lag = 0; lag < result.rho.size(); ++lag) {
                rho_series.rows.push_back({static_cast<double>(i), static_cast<double>(j),
                                           static_cast<double>(lag), result.rho[lag]});
            }
            summary.rows.push_back({static_cast<double>(i), static_cast<double>(j),
                                    static_cast<double>(result.n_c), result.coherence_time,
                                    result.outage ? 1.0 : 0.0, result.censored ? 1.0 : 0.0});
            t_c_values.push_back(result.coherence_time);
        }
    }

    if (!rho_series.rows.empty()) {
        emit_plot_data(rho_series, ctx.out_path("coherence_rho.csv"));
    }
    emit_plot_data(summary, ctx.out_path("coherence_summary.csv"));

    Series cdf;
    cdf.columns = {"t_c_s", "probability"};
    for (const auto& [value, prob] : coherence::empirical_cdf(t_c_values)) {
        cdf.rows.push_back({value, prob});
    }
    emit_plot_data(cdf, ctx.out_path("coherence_cdf.csv"));

    ctx.manifest.config["coherence"] = {{"eta_th", cfg.eta_th},
                                        {"max_lag", cfg.max_lag},
                                        {"outage_policy",
                                         cfg.outage_policy ==
                                                 coherence::OutagePolicy::zero_if_any_outage
                                             ? "zero_if_any_outage"
                                             : "ignore_outage"}};
}

void run_rate(RunContext& ctx, const RateParams& p) {
    const auto trace = resolve_trace(ctx);
    const auto constellation =
        rate::pam_uniform(p.levels, p.peak_optical, p.avg_optical, p.electrical);
    rate::RateConfig rc;
    rc.bandwidth = p.bandwidth;
    rc.noise_var = p.noise_var;
    rc.mc_samples = p.mc_samples;
    rc.seed = rng::derive_seed(ctx.spec.seed, "rate");

    const auto series = rate::rate_along_trace(trace, p.options, constellation, rc);

    Series out;
    out.columns = {"t_s", "rate_bits_s", "stderr", "clamped_bits_s"};
    for (const auto& point : series) {
        out.rows.push_back({point.t, point.rate.bits_per_s, point.rate.std_error,
                            point.rate.clamped_bits_per_s});
    }
    emit_plot_data(out, ctx.out_path("rate.csv"));

    ctx.manifest.config["rate"] = {{"levels", p.levels},
                                   {"bandwidth_hz", p.bandwidth},
                                   {"noise_var", p.noise_var},
                                   {"mc_samples", p.mc_samples},
                                   {"peak_optical", p.peak_optical},
                                   {"avg_optical", p.avg_optical},
                                   {"electrical", p.electrical}};
}

void run_estimate(RunContext& ctx, const EstimateParams& p) {
    if (p.scheme == estimation::Scheme::cdrn) {
        throw Error(Errc::config, "scheme 'cdrn' runs through the denoise command");
    }
    if (p.trials < 1) throw Error(Errc::config, "trial count must be >= 1");
    const auto trace = resolve_trace(ctx);
    const auto series = scalar_series(trace, p.led, p.pd);

    const estimation::PilotDesign design = p.scheme == estimation::Scheme::zf_coding
                                               ? estimation::design_pilot(p.pilot)
                                               : estimation::uniform_pilot(p.pilot);
    rng::Generator gen(rng::derive_seed(ctx.spec.seed, "estimate-noise"));
    const double sigma = std::sqrt(p.noise_var);

    estimation::EstimatorReport report;
    report.scheme = p.scheme;
    double err_sq = 0.0, ref_sq = 0.0;
    Series out;
    out.columns = {"trial", "h_true", "h_hat", "delta_h"};
    std::size_t slot = 0, produced = 0, scanned = 0;
    const std::size_t len = series.size();
    while (produced < static_cast<std::size_t>(p.trials)) {
        if (scanned > len && produced == 0) {
            throw Error(Errc::config, "selected channel has no non-outage slots to estimate");
        }
        const double h = series[slot % len];
        slot = (slot + 1) % len;
        ++scanned;
        if (h == 0.0) continue; // outage slot: delta_h undefined, skip

        Eigen::VectorXd y(design.amplitudes.size());
        for (Eigen::Index i = 0; i < y.size(); ++i) {
            y[i] = h * design.amplitudes[i] + sigma * gen.normal();
        }
        const double h_hat = p.scheme == estimation::Scheme::zf_coding
                                 ? estimation::zf_estimate(y, design)
                                 : estimation::ls_estimate(y, design.amplitudes);
        const double dh = neural::delta_h(h_hat, h);
        report.h_true.push_back(h);
        report.h_hat.push_back(h_hat);
        report.delta_h.push_back(dh);
        err_sq += (h_hat - h) * (h_hat - h);
        ref_sq += h * h;
        out.rows.push_back({static_cast<double>(produced), h, h_hat, dh});
        ++produced;
    }
    report.nmse = err_sq / ref_sq;
    emit_plot_data(out, ctx.out_path("estimate.csv"));

    Series summary;
    summary.columns = {"nmse", "trials", "noise_var_factor"};
    summary.rows.push_back(
        {report.nmse, static_cast<double>(p.trials), design.noise_var_factor});
    emit_plot_data(summary, ctx.out_path("estimate_summary.csv"));

    ctx.manifest.config["estimate"] = {{"scheme", estimation::scheme_name(p.scheme)},
                                       {"pilot_length", p.pilot.length},
                                       {"pilot_peak", p.pilot.peak},
                                       {"pilot_average", p.pilot.average},
                                       {"noise_var", p.noise_var},
                                       {"trials", p.trials},
                                       {"led", p.led},
                                       {"pd", p.pd}};
}

void run_denoise(RunContext& ctx, const DenoiseParams& p) {
    const auto trace = resolve_trace(ctx);
    const auto series = scalar_series(trace, p.led, p.pd);
    const auto coh = coherence::coherence_time(series, trace.sample_rate, p.coh);

    // Per-slot LS inputs need power in every pilot slot, so pairs are built
    // from the flat pilot at the average power.
    const auto pilot = estimation::uniform_pilot(p.pilot);
    auto pairs = neural::build_training_pairs(trace, coh, pilot, p.noise_var,
                                              rng::derive_seed(ctx.spec.seed, "pairs-noise"),
                                              p.led, p.pd);

    auto eval_count = static_cast<std::size_t>(
        std::floor(p.eval_fraction * static_cast<double>(pairs.size())));
    if (eval_count >= pairs.size()) eval_count = pairs.size() - 1;
    const std::size_t train_count = pairs.size() - eval_count;
    std::vector<neural::TrainingPair> train_pairs(pairs.begin(),
                                                  pairs.begin() + static_cast<long>(train_count));

    neural::CdrnConfig cdrn_cfg = p.cdrn;
    cdrn_cfg.seed = rng::derive_seed(ctx.spec.seed, "cdrn");
    const auto trained = neural::cdrn_train(train_pairs, cdrn_cfg);

    Series loss;
    loss.columns = {"epoch", "loss"};
    for (std::size_t e = 0; e < trained.loss_history.size(); ++e) {
        loss.rows.push_back({static_cast<double>(e), trained.loss_history[e]});
    }
    emit_plot_data(loss, ctx.out_path("denoise_loss.csv"));

    Series pair_report;
    pair_report.columns = {"pair", "split", "nmse_ls", "nmse_cdrn"};
    Series slot_report;
    slot_report.columns = {"trial", "h_true", "h_hat", "delta_h"};
    std::size_t trial = 0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& pair = pairs[i];
        const auto [h_prev, h_next] = neural::cdrn_denoise(trained.model, pair.ls_prev, pair.ls_next);
        pair_report.rows.push_back({static_cast<double>(i), i < train_count ? 0.0 : 1.0,
                                    neural::nmse(pair.ls_next, pair.target),
                                    neural::nmse(h_next, pair.target)});
        if (i >= train_count) {
            for (Eigen::Index x = 0; x < h_next.size(); ++x) {
                const double h = pair.target[x];
                if (h == 0.0) continue;
                slot_report.rows.push_back({static_cast<double>(trial++), h, h_next[x],
                                            neural::delta_h(h_next[x], h)});
            }
        }
    }
    emit_plot_data(pair_report, ctx.out_path("denoise_pairs.csv"));
    if (!slot_report.rows.empty()) {
        emit_plot_data(slot_report, ctx.out_path("denoise_report.csv"));
    }
    neural::save_cdrn(ctx.out_path("cdrn_model.json"), trained.model);

    ctx.manifest.config["denoise"] = {{"coherence_eta_th", p.coh.eta_th},
                                      {"pilot_length", p.pilot.length},
                                      {"noise_var", p.noise_var},
                                      {"blocks", p.cdrn.blocks},
                                      {"layers_per_block", p.cdrn.layers_per_block},
                                      {"filters", p.cdrn.filters},
                                      {"kernel", p.cdrn.kernel},
                                      {"epochs", p.cdrn.epochs},
                                      {"led", p.led},
                                      {"pd", p.pd}};
}

void run_track(RunContext& ctx, const TrackParams& p) {
    const auto trace = resolve_trace(ctx);
    const auto series = scalar_series(trace, p.led, p.pd);

    neural::TrackerConfig cfg = p.cfg;
    cfg.seed = rng::derive_seed(ctx.spec.seed, "track");
    const auto result = neural::track_channel(series, cfg, p.kind);

    Series out;
    out.columns = {"n", "h_true", "h_pred", "delta_h", "gap"};
    for (std::size_t i = 0; i < result.slots.size(); ++i) {
        out.rows.push_back({static_cast<double>(result.slots[i]), result.h_true[i],
                            result.h_pred[i], result.delta_h[i], result.gap[i] ? 1.0 : 0.0});
    }
    emit_plot_data(out, ctx.out_path("track.csv"));

    Series loss;
    loss.columns = {"epoch", "loss"};
    for (std::size_t e = 0; e < result.loss_history.size(); ++e) {
        loss.rows.push_back({static_cast<double>(e), result.loss_history[e]});
    }
    emit_plot_data(loss, ctx.out_path("track_loss.csv"));
    neural::save_tracker(ctx.out_path("tracker_model.json"), result.model);

    ctx.manifest.config["track"] = {
        {"kind", p.kind == neural::TrackerKind::lstm ? "lstm" : "rnn"},
        {"hidden", p.cfg.hidden},
        {"window", p.cfg.window},
        {"iterations", p.cfg.iterations},
        {"learning_rate", p.cfg.learning_rate},
        {"train_fraction", p.cfg.train_fraction},
        {"mean_delta_h", result.mean_delta_h},
        {"led", p.led},
        {"pd", p.pd}};
}

} // namespace

RunManifest run(const ExperimentSpec& spec) {
    const auto start = std::chrono::steady_clock::now();

    std::error_code ec;
    fs::create_directories(spec.out_dir, ec);
    if (ec) throw Error(Errc::config, "cannot create output directory: " + spec.out_dir);

    RunContext ctx{spec, RunManifest{}};
    ctx.manifest.toolkit_version = toolkit_version();
    ctx.manifest.command = command_name(spec.command);
    ctx.manifest.config = json::object();
    ctx.manifest.config["seed"] = spec.seed;

    switch (spec.command) {
        case Command::simulate: run_simulate(ctx, std::get<SimulateParams>(spec.params)); break;
        case Command::coherence: run_coherence(ctx, std::get<CoherenceParams>(spec.params)); break;
        case Command::rate: run_rate(ctx, std::get<RateParams>(spec.params)); break;
        case Command::estimate: run_estimate(ctx, std::get<EstimateParams>(spec.params)); break;
        case Command::denoise: run_denoise(ctx, std::get<DenoiseParams>(spec.params)); break;
        case Command::track: run_track(ctx, std::get<TrackParams>(spec.params)); break;
    }

    const auto end = std::chrono::steady_clock::now();
    ctx.manifest.duration_s = std::chrono::duration<double>(end - start).count();
    write_manifest((fs::path(spec.out_dir) / "manifest.json").string(), ctx.manifest);
    return ctx.manifest;
}

} // namespace lifi::io
