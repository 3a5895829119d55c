// SPDX-License-Identifier: Apache-2.0

#include "lifi/rate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "lifi/rng.hpp"

namespace lifi::rate {

namespace {

constexpr double kLn2 = 0.69314718055994530942;

} // namespace

void Constellation::validate() const {
    if (points.size() < 2) throw std::invalid_argument("constellation needs at least two points");
    if (points.size() != probs.size()) {
        throw std::invalid_argument("constellation points and probabilities differ in length");
    }
    double prob_sum = 0.0, mean = 0.0, power = 0.0;
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (!(probs[k] >= 0.0)) throw std::invalid_argument("constellation probabilities must be non-negative");
        if (points[k] < 0.0 || points[k] > peak_optical + 1e-12) {
            throw std::invalid_argument("constellation point violates the instantaneous optical cap");
        }
        prob_sum += probs[k];
        mean += probs[k] * points[k];
        power += probs[k] * points[k] * points[k];
    }
    if (std::abs(prob_sum - 1.0) > 1e-12) {
        throw std::invalid_argument("constellation probabilities must sum to 1");
    }
    if (mean > avg_optical + 1e-12) {
        throw std::invalid_argument("constellation violates the average optical cap: mean " +
                                    std::to_string(mean) + " > " + std::to_string(avg_optical));
    }
    if (power > electrical + 1e-12) {
        throw std::invalid_argument("constellation violates the electrical power cap: power " +
                                    std::to_string(power) + " > " + std::to_string(electrical));
    }
}

Constellation pam_uniform(int levels, double peak_optical, double avg_optical, double electrical) {
    if (levels < 2) throw std::invalid_argument("M-PAM needs at least two levels");
    if (!(peak_optical > 0.0)) throw std::invalid_argument("instantaneous optical cap must be positive");
    Constellation c;
    c.peak_optical = peak_optical;
    c.avg_optical = avg_optical;
    c.electrical = electrical;
    c.points.resize(static_cast<std::size_t>(levels));
    c.probs.assign(static_cast<std::size_t>(levels), 1.0 / static_cast<double>(levels));
    for (int k = 0; k < levels; ++k) {
        c.points[static_cast<std::size_t>(k)] =
            static_cast<double>(k) * peak_optical / static_cast<double>(levels - 1);
    }
    c.validate();
    return c;
}

void RateConfig::validate() const {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    if (!(noise_var > 0.0)) throw std::invalid_argument("noise variance must be positive");
    if (mc_samples < 1000) throw std::invalid_argument("mc_samples must be at least 1000");
}

RateEstimate rate_siso(double gain, const Constellation& c, const RateConfig& rc) {
    if (gain < 0.0 || !std::isfinite(gain)) {
        throw std::invalid_argument("channel gain must be finite and non-negative");
    }
    c.validate();
    rc.validate();

    const double b = rc.bandwidth;
    const double sigma = std::sqrt(rc.noise_var);
    const double sqrt_b = std::sqrt(b);
    const double inv_2bs2 = 1.0 / (2.0 * b * rc.noise_var);
    const auto m = c.points.size();

    rng::Generator gen(rc.seed);

    // Welford accumulation of the per-draw statistic
    // X(z) = sum_k p_k log2 sum_m p_m exp(Lambda_km(z)).
    double mean = 0.0, m2 = 0.0;
    std::vector<double> lam(m);
    for (std::size_t s = 0; s < rc.mc_samples; ++s) {
        const double z = sigma * gen.normal();
        double x = 0.0;
        for (std::size_t k = 0; k < m; ++k) {
            double lam_max = -std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < m; ++j) {
                const double arg = gain * (c.points[k] - c.points[j]) + sqrt_b * z;
                lam[j] = -arg * arg * inv_2bs2;
                lam_max = std::max(lam_max, lam[j]);
            }
            double acc = 0.0;
            for (std::size_t j = 0; j < m; ++j) acc += c.probs[j] * std::exp(lam[j] - lam_max);
            x += c.probs[k] * (lam_max + std::log(acc)) / kLn2;
        }
        const double delta = x - mean;
        mean += delta / static_cast<double>(s + 1);
        m2 += delta * (x - mean);
    }
    const double var_x = m2 / static_cast<double>(rc.mc_samples - 1);

    RateEstimate est;
    est.bits_per_s = -b / kLn2 - 2.0 * b * mean;
    est.clamped_bits_per_s = std::max(est.bits_per_s, 0.0);
    est.std_error = 2.0 * b * std::sqrt(var_x / static_cast<double>(rc.mc_samples));
    return est;
}

RateEstimate rate_simo(const Eigen::VectorXd& gains, const Eigen::VectorXd& rx_combiner,
                       const Constellation& c, const RateConfig& rc) {
    if (gains.size() != rx_combiner.size()) {
        throw std::invalid_argument("gain vector and receive combiner differ in length");
    }
    return rate_siso(std::abs(rx_combiner.dot(gains)), c, rc);
}

RateEstimate rate_miso(const Eigen::VectorXd& gains, const Eigen::VectorXd& tx_weights,
                       const Constellation& c, const RateConfig& rc) {
    if (gains.size() != tx_weights.size()) {
        throw std::invalid_argument("gain vector and transmit weights differ in length");
    }
    return rate_siso(std::abs(tx_weights.dot(gains)), c, rc);
}

RateEstimate rate_mimo(const Eigen::MatrixXd& gains, const Eigen::VectorXd& tx_weights,
                       const Eigen::VectorXd& rx_combiner, const Constellation& c,
                       const RateConfig& rc) {
    if (gains.rows() != tx_weights.size() || gains.cols() != rx_combiner.size()) {
        throw std::invalid_argument("gain matrix and beamformer dimensions do not match");
    }
    return rate_siso(std::abs(tx_weights.dot(gains * rx_combiner)), c, rc);
}

Beamformers choose_beamformers(const Eigen::MatrixXd& gains, BeamformerPolicy policy) {
    if ((gains.array() < 0.0).any()) {
        throw std::invalid_argument("gain matrix must be entrywise non-negative");
    }
    const Eigen::Index k = gains.rows();
    const Eigen::Index n = gains.cols();
    if (k == 0 || n == 0) throw std::invalid_argument("gain matrix is empty");

    Beamformers bf;
    bf.policy = policy;
    const double unit_rx = 1.0 / std::sqrt(static_cast<double>(n));
    const double unit_tx = 1.0 / std::sqrt(static_cast<double>(k));

    if (gains.isZero(0.0) || policy == BeamformerPolicy::uniform) {
        bf.rx = Eigen::VectorXd::Constant(n, unit_rx);
        bf.tx = Eigen::VectorXd::Constant(k, unit_tx);
        bf.zero_gain_warning = gains.isZero(0.0);
        return bf;
    }

    switch (policy) {
        case BeamformerPolicy::mrc: {
            // Match the receive combiner to the LED-aggregated per-PD gain,
            // then match the transmit weights to the combined column.
            Eigen::VectorXd agg = gains.colwise().sum().transpose();
            bf.rx = agg / agg.norm();
            Eigen::VectorXd tx = gains * bf.rx;
            const double tx_norm = tx.norm();
            bf.tx = tx_norm > 0.0 ? Eigen::VectorXd(tx / tx_norm)
                                  : Eigen::VectorXd::Constant(k, unit_tx);
            break;
        }
        case BeamformerPolicy::dominant_singular: {
            // Power iteration on G^T G for the leading right singular vector.
            Eigen::VectorXd v = Eigen::VectorXd::Constant(n, unit_rx);
            for (int it = 0; it < 200; ++it) {
                Eigen::VectorXd next = gains.transpose() * (gains * v);
                const double norm = next.norm();
                if (norm == 0.0) break;
                next /= norm;
                const double residual = (next - v).norm();
                v = next;
                if (residual < 1e-12) break;
            }
            bf.rx = v;
            Eigen::VectorXd u = gains * v;
            const double u_norm = u.norm();
            if (u_norm == 0.0) {
                bf.rx = Eigen::VectorXd::Constant(n, unit_rx);
                bf.tx = Eigen::VectorXd::Constant(k, unit_tx);
                bf.zero_gain_warning = true;
                return bf;
            }
            bf.tx = u / u_norm;
            break;
        }
        case BeamformerPolicy::uniform:
            break; // handled above
    }
    if (bf.tx.dot(gains * bf.rx) < 0.0) bf.tx = -bf.tx;
    return bf;
}

double effective_gain(const Eigen::MatrixXd& gains, const Beamformers& bf) {
    return bf.tx.dot(gains * bf.rx);
}

std::vector<TraceRatePoint> rate_along_trace(const channel::ChannelTrace& trace,
                                             const TraceRateOptions& opts, const Constellation& c,
                                             const RateConfig& rc) {
    if (trace.gains.empty()) throw std::invalid_argument("channel trace is empty");
    if (!(trace.sample_rate > 0.0)) throw std::invalid_argument("channel trace sample rate must be positive");
    const Eigen::Index k_all = trace.gains.front().rows();
    const Eigen::Index n_all = trace.gains.front().cols();

    std::vector<int> leds = opts.led_indices;
    std::vector<int> pds = opts.pd_indices;
    if (opts.topology == Topology::siso || opts.topology == Topology::simo) leds.resize(1);
    if (opts.topology == Topology::siso || opts.topology == Topology::miso) pds.resize(1);
    if (leds.empty() || pds.empty()) throw std::invalid_argument("index selection is empty");
    for (int idx : leds) {
        if (idx < 0 || idx >= k_all) throw std::out_of_range("LED index out of range");
    }
    for (int idx : pds) {
        if (idx < 0 || idx >= n_all) throw std::out_of_range("PD index out of range");
    }

    std::vector<TraceRatePoint> series;
    series.reserve(trace.gains.size());
    for (std::size_t slot = 0; slot < trace.gains.size(); ++slot) {
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(leds.size()),
                            static_cast<Eigen::Index>(pds.size()));
        for (std::size_t i = 0; i < leds.size(); ++i) {
            for (std::size_t j = 0; j < pds.size(); ++j) {
                sub(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                    trace.gains[slot](leds[i], pds[j]);
            }
        }
        const Beamformers bf = choose_beamformers(sub, opts.policy);
        const double g = std::abs(effective_gain(sub, bf));
        TraceRatePoint point;
        point.t = static_cast<double>(slot) / trace.sample_rate;
        point.rate = rate_siso(g, c, rc);
        series.push_back(point);
    }
    return series;
}

} // namespace lifi::rate
