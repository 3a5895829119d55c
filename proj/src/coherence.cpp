// SPDX-License-Identifier: Apache-2.0

#include "lifi/coherence.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace lifi::coherence {

void CoherenceConfig::validate() const {
    if (!(eta_th > 0.0) || !(eta_th < 1.0)) {
        throw std::invalid_argument("coherence threshold must lie in (0, 1)");
    }
    if (max_lag < 1) throw std::invalid_argument("max_lag must be at least 1");
}

namespace {

double sequence_mean(std::span<const double> h) {
    return std::accumulate(h.begin(), h.end(), 0.0) / static_cast<double>(h.size());
}

double autocov_with_mean(std::span<const double> h, std::size_t lag, double mean) {
    const std::size_t pairs = h.size() - lag;
    double acc = 0.0;
    for (std::size_t n = 0; n < pairs; ++n) {
        acc += (h[n] - mean) * (h[n + lag] - mean);
    }
    return acc / static_cast<double>(pairs);
}

} // namespace

double autocorrelation(std::span<const double> h, std::size_t lag) {
    if (h.empty()) throw std::invalid_argument("sequence is empty");
    if (lag >= h.size()) throw std::out_of_range("lag must be smaller than the sequence length");
    return autocov_with_mean(h, lag, sequence_mean(h));
}

double rho(std::span<const double> h, std::size_t lag) {
    if (h.empty()) throw std::invalid_argument("sequence is empty");
    if (lag >= h.size()) throw std::out_of_range("lag must be smaller than the sequence length");
    const double mean = sequence_mean(h);
    const double var = autocov_with_mean(h, 0, mean);
    if (var <= 0.0) throw std::domain_error("degenerate sequence: zero variance");
    return autocov_with_mean(h, lag, mean) / var;
}

CoherenceResult coherence_time(std::span<const double> h, double sample_rate,
                               const CoherenceConfig& cfg) {
    cfg.validate();
    if (h.empty()) throw std::invalid_argument("sequence is empty");
    if (!(sample_rate > 0.0)) throw std::invalid_argument("sample rate must be positive");

    CoherenceResult result;
    if (cfg.outage_policy == OutagePolicy::zero_if_any_outage) {
        if (std::any_of(h.begin(), h.end(), [](double v) { return v == 0.0; })) {
            result.outage = true;
            result.n_c = 0;
            result.coherence_time = 0.0;
            return result;
        }
    }

    const double mean = sequence_mean(h);
    const double var = autocov_with_mean(h, 0, mean);
    if (var <= 0.0) throw std::domain_error("degenerate sequence: zero variance");

    const std::size_t lag_cap = std::min(cfg.max_lag, h.size() - 1);
    result.rho.reserve(lag_cap + 1);
    result.rho.push_back(1.0);

    std::size_t crossing = 0;
    for (std::size_t lag = 1; lag <= lag_cap; ++lag) {
        const double r = autocov_with_mean(h, lag, mean) / var;
        result.rho.push_back(r);
        if (crossing == 0 && r <= cfg.eta_th) {
            crossing = lag;
            if (!cfg.full_curve) break;
        }
    }

    if (crossing == 0) {
        result.censored = true;
        result.n_c = lag_cap;
    } else {
        result.n_c = crossing;
    }
    result.coherence_time = static_cast<double>(result.n_c) / sample_rate;
    return result;
}

std::vector<std::pair<double, double>> empirical_cdf(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("empirical CDF needs at least one value");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());

    std::vector<std::pair<double, double>> steps;
    const auto n = static_cast<double>(sorted.size());
    std::size_t i = 0;
    while (i < sorted.size()) {
        std::size_t j = i;
        while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
        steps.emplace_back(sorted[i], static_cast<double>(j) / n);
        i = j;
    }
    steps.back().second = 1.0;
    return steps;
}

} // namespace lifi::coherence
