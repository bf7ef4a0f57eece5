#pragma once

#include <cmath>
#include <stdexcept>

namespace lmoq {

struct LineSearchConfig {
    double armijo_c = 1e-3;
    double backtrack_factor = 0.5;
    double alpha_init = 1.0;
    int max_backtracks = 30;

    void validate() const {
        if (!(armijo_c > 0.0 && armijo_c < 1.0))
            throw std::invalid_argument("LineSearchConfig: armijo_c must lie in (0, 1)");
        if (!(backtrack_factor > 0.0 && backtrack_factor < 1.0))
            throw std::invalid_argument("LineSearchConfig: backtrack_factor must lie in (0, 1)");
        if (!(alpha_init > 0.0))
            throw std::invalid_argument("LineSearchConfig: alpha_init must be positive");
        if (max_backtracks < 1)
            throw std::invalid_argument("LineSearchConfig: max_backtracks must be positive");
    }
};

enum class LineSearchStatus { accepted, exhausted };

struct LineSearchResult {
    double alpha;
    double value;  // phi(alpha)
    int fev_used;
    LineSearchStatus status;

    bool ok() const { return status == LineSearchStatus::accepted; }
};

/// Backtracking Armijo search over alpha_init * factor^j, j = 0..max_backtracks.
/// On exhaustion the last trial step is returned with status `exhausted`.
template <class Phi>
LineSearchResult backtracking_search(Phi&& phi, double phi0, double dphi0,
                                     const LineSearchConfig& config = {}) {
    if (!(dphi0 < 0.0))
        throw std::invalid_argument("backtracking_search: not a descent direction");
    config.validate();

    double alpha = config.alpha_init;
    double value = 0.0;
    int fev = 0;
    for (int j = 0; j <= config.max_backtracks; ++j) {
        if (j > 0)
            alpha *= config.backtrack_factor;
        value = phi(alpha);
        ++fev;
        if (value <= phi0 + config.armijo_c * alpha * dphi0)
            return {alpha, value, fev, LineSearchStatus::accepted};
    }
    return {alpha, value, fev, LineSearchStatus::exhausted};
}

} // namespace lmoq
