#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lmoq {

/// Which form of the theta recurrence drives the momentum schedule.
enum class ThetaRecurrence {
    /// theta'^2 = (1 - theta') theta^2 + gamma theta'   (standard Nesterov, default)
    corrected,
    /// theta'^2 = (1 + theta') theta^2 + gamma theta'   (kept for A/B inspection)
    literal,
};

/// Positive root of theta'^2 + (theta^2 - gamma) theta' - theta^2 = 0.
inline double advance_theta(double theta_k, double gamma) {
    if (!(theta_k > 0.0) || theta_k > 1.0)
        throw std::domain_error("advance_theta: theta_k must lie in (0, 1]");
    if (!(gamma > 0.0))
        throw std::domain_error("advance_theta: gamma must be positive");
    const double c = theta_k * theta_k;
    const double b = c - gamma;
    const double disc = std::sqrt(b * b + 4.0 * c);
    // Avoid cancellation in -b + disc when b > 0.
    return b > 0.0 ? 2.0 * c / (b + disc) : 0.5 * (disc - b);
}

/// Positive root of theta'^2 - (theta^2 + gamma) theta' - theta^2 = 0. The
/// resulting sequence grows past 1.
inline double advance_theta_literal(double theta_k, double gamma) {
    if (!(theta_k > 0.0))
        throw std::domain_error("advance_theta_literal: theta_k must be positive");
    if (!(gamma > 0.0))
        throw std::domain_error("advance_theta_literal: gamma must be positive");
    const double c = theta_k * theta_k;
    const double b = c + gamma;
    return 0.5 * (b + std::sqrt(b * b + 4.0 * c));
}

inline constexpr double default_mu_cap = 0.99999;
inline constexpr double default_gamma = 1e-5;

/// mu_k = theta_k (1 - theta_k) / (theta_k^2 + theta_{k+1}), clipped to mu_cap.
inline double compute_mu(double theta_k, double theta_k1, double mu_cap = default_mu_cap) {
    if (!(theta_k > 0.0) || !(theta_k1 > 0.0))
        throw std::domain_error("compute_mu: theta values must be positive");
    if (theta_k > 1.0)
        throw std::domain_error("compute_mu: theta_k must not exceed 1");
    const double mu = theta_k * (1.0 - theta_k) / (theta_k * theta_k + theta_k1);
    return std::clamp(mu, 0.0, mu_cap);
}

/// Produces the momentum coefficient sequence mu_0, mu_1, ... starting from theta_0 = 1.
class MomentumSchedule {
public:
    explicit MomentumSchedule(double gamma = default_gamma, double mu_cap = default_mu_cap,
                              ThetaRecurrence form = ThetaRecurrence::corrected)
        : gamma_(gamma), mu_cap_(mu_cap), form_(form) {
        if (!(gamma > 0.0))
            throw std::domain_error("MomentumSchedule: gamma must be positive");
        if (!(mu_cap >= 0.0 && mu_cap < 1.0))
            throw std::domain_error("MomentumSchedule: mu_cap must lie in [0, 1)");
    }

    double theta() const { return theta_; }
    double gamma() const { return gamma_; }
    double mu_cap() const { return mu_cap_; }
    ThetaRecurrence form() const { return form_; }

    /// Returns mu_k for the current theta_k and advances to theta_{k+1}.
    double next() {
        double mu = 0.0;
        if (form_ == ThetaRecurrence::corrected) {
            const double t1 = advance_theta(theta_, gamma_);
            mu = compute_mu(theta_, t1, mu_cap_);
            theta_ = t1;
        } else {
            const double t1 = advance_theta_literal(theta_, gamma_);
            // theta exceeds 1 after the first step, so the raw value is
            // negative (and NaN once theta overflows).
            const double raw = theta_ * (1.0 - theta_) / (theta_ * theta_ + t1);
            mu = raw > 0.0 ? std::min(raw, mu_cap_) : 0.0;
            theta_ = t1;
        }
        return mu;
    }

private:
    double theta_ = 1.0;
    double gamma_;
    double mu_cap_;
    ThetaRecurrence form_;
};

} // namespace lmoq
