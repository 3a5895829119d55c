// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cmath>
#include <stdexcept>

#include <Eigen/Dense>

namespace lifi::neural {

// Normalized mean squared error ||h_hat - h||^2 / ||h||^2.
inline double nmse(const Eigen::VectorXd& h_hat, const Eigen::VectorXd& h) {
    if (h_hat.size() != h.size()) throw std::invalid_argument("nmse vector sizes differ");
    const double ref = h.squaredNorm();
    if (ref == 0.0) throw std::domain_error("nmse reference vector is zero");
    return (h_hat - h).squaredNorm() / ref;
}

// Normalized per-slot channel error |h - h_hat| / h.
inline double delta_h(double h_hat, double h) {
    if (h == 0.0) throw std::domain_error("delta_h undefined for a zero channel value");
    return std::abs(h - h_hat) / h;
}

} // namespace lifi::neural
