#pragma once

#include "linesearch.hpp"
#include "lmem.hpp"
#include "momentum.hpp"
#include "types.hpp"

#include <Eigen/QR>

#include <chrono>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lmoq {

/// Anything exposing E(w) and its gradient.
template <class F>
concept Objective = requires(const F& f, const ParamVector& w) {
    { f.value(w) } -> std::convertible_to<double>;
    { f.gradient(w) } -> std::convertible_to<ParamVector>;
};

enum class OptimizerKind { lbfgs, lnaq, lmoq };

inline constexpr OptimizerKind all_optimizer_kinds[] = {OptimizerKind::lbfgs, OptimizerKind::lnaq,
                                                        OptimizerKind::lmoq};

inline std::string_view to_string(OptimizerKind kind) {
    switch (kind) {
    case OptimizerKind::lbfgs: return "lbfgs";
    case OptimizerKind::lnaq: return "lnaq";
    case OptimizerKind::lmoq: return "lmoq";
    }
    return "?";
}

inline std::string_view display_name(OptimizerKind kind) {
    switch (kind) {
    case OptimizerKind::lbfgs: return "L-BFGS";
    case OptimizerKind::lnaq: return "L-NAQ";
    case OptimizerKind::lmoq: return "L-MoQ";
    }
    return "?";
}

inline OptimizerKind parse_optimizer_kind(std::string_view name) {
    for (OptimizerKind k : all_optimizer_kinds)
        if (name == to_string(k) || name == display_name(k))
            return k;
    throw std::invalid_argument("unknown optimizer: " + std::string(name));
}

struct OptimizerConfig {
    std::size_t memory = 16;
    long k_max = 10000;
    double epsilon = 1e-6;
    double gamma = default_gamma;
    double mu_cap = default_mu_cap;
    ThetaRecurrence theta_form = ThetaRecurrence::corrected;
    LineSearchConfig line_search{};

    void validate() const {
        if (memory < 1)
            throw std::invalid_argument("OptimizerConfig: memory must be at least 1");
        if (k_max < 1)
            throw std::invalid_argument("OptimizerConfig: k_max must be at least 1");
        if (!(epsilon > 0.0))
            throw std::invalid_argument("OptimizerConfig: epsilon must be positive");
        line_search.validate();
    }
};

struct OptimizerState {
    ParamVector w;
    ParamVector v;                         // velocity, w_{k+1} = w_k + v_{k+1}
    ParamVector grad;                      // gradient at w
    std::optional<ParamVector> grad_prev;  // gradient at w_{k-1}
    double value = 0.0;                    // E(w)
    long k = 0;
    long fev = 0;
    long gev = 0;
    MomentumSchedule schedule;
    LmemBuffer memory;
    bool converged = false;
    bool diverged = false;

    double grad_norm() const { return grad.norm(); }
};

/// Evaluates E and its gradient at w0 (one fev, one gev).
template <Objective F>
OptimizerState make_state(const F& objective, ParamVector w0, const OptimizerConfig& config) {
    config.validate();
    OptimizerState st{
        .w = std::move(w0),
        .v = {},
        .grad = {},
        .grad_prev = std::nullopt,
        .schedule = MomentumSchedule(config.gamma, config.mu_cap, config.theta_form),
        .memory = LmemBuffer(config.memory),
    };
    st.v = ParamVector::Zero(st.w.size());
    st.value = objective.value(st.w);
    ++st.fev;
    st.grad = objective.gradient(st.w);
    ++st.gev;
    st.diverged = !std::isfinite(st.value) || !st.grad.allFinite();
    st.converged = !st.diverged && st.grad_norm() <= config.epsilon;
    return st;
}

/// What happened during one iteration.
struct StepInfo {
    bool taken = false;
    double mu = 0.0;
    double alpha = 0.0;
    double base_value = 0.0;  // phi(0)
    double slope = 0.0;       // phi'(0) as used by the line search
    double new_value = 0.0;
    int fev = 0;
    int gev = 0;
    bool pair_accepted = false;
    bool memory_reset = false;
    LineSearchStatus search_status = LineSearchStatus::accepted;
};

namespace detail {

// Shared tail of every driver: search along d from `base`, move, evaluate the
// new gradient, and store the curvature pair (s, y) with y = grad_new - r.
template <Objective F>
StepInfo search_and_update(OptimizerState& st, const F& objective, const OptimizerConfig& config,
                           const ParamVector& base, double base_value, const ParamVector& r,
                           double mu, StepInfo info) {
    ParamVector d = -st.memory.two_loop(r);
    double slope = r.dot(d);
    if (!(slope < 0.0) || !d.allFinite()) {
        st.memory.clear();
        d = -r;
        slope = -r.squaredNorm();
        info.memory_reset = true;
    }
    info.mu = mu;
    info.base_value = base_value;
    info.slope = slope;
    if (!(slope < 0.0)) {
        // r vanished; nothing to search along.
        st.converged = st.grad_norm() <= config.epsilon;
        return info;
    }

    ParamVector trial(base.size());
    auto phi = [&](double alpha) {
        trial = base + alpha * d;
        return objective.value(trial);
    };
    const LineSearchResult ls = backtracking_search(phi, base_value, slope, config.line_search);
    info.fev += ls.fev_used;
    st.fev += ls.fev_used;
    info.alpha = ls.alpha;
    info.search_status = ls.status;
    info.new_value = ls.value;

    ParamVector step = ls.alpha * d;
    ParamVector w_new = base + step;
    ParamVector g_new = objective.gradient(w_new);
    ++info.gev;
    ++st.gev;

    info.pair_accepted = st.memory.push_pair(step, g_new - r);

    st.v = w_new - st.w;
    st.grad_prev = std::move(st.grad);
    st.w = std::move(w_new);
    st.grad = std::move(g_new);
    st.value = ls.value;
    ++st.k;
    info.taken = true;
    st.diverged = !std::isfinite(st.value) || !st.grad.allFinite() || !st.w.allFinite();
    st.converged = !st.diverged && st.grad_norm() <= config.epsilon;
    return info;
}

inline bool gate(OptimizerState& st, const OptimizerConfig& config) {
    if (st.diverged)
        return false;
    if (st.grad_norm() <= config.epsilon) {
        st.converged = true;
        return false;
    }
    return true;
}

} // namespace detail

/// One L-BFGS iteration: d = -H grad, s = w_{k+1} - w_k, y = grad_{k+1} - grad_k.
template <Objective F>
StepInfo step_lbfgs(OptimizerState& st, const F& objective, const OptimizerConfig& config) {
    if (!detail::gate(st, config))
        return {};
    const ParamVector base = st.w;
    const ParamVector r = st.grad;
    return detail::search_and_update(st, objective, config, base, st.value, r, 0.0, StepInfo{});
}

/// One L-NAQ iteration: the direction uses the true gradient at the look-ahead
/// point w_k + mu_k v_k (one extra gradient evaluation when mu_k != 0).
template <Objective F>
StepInfo step_lnaq(OptimizerState& st, const F& objective, const OptimizerConfig& config) {
    if (!detail::gate(st, config))
        return {};
    StepInfo info;
    const double mu = st.schedule.next();
    if (mu == 0.0) {
        const ParamVector base = st.w;
        const ParamVector r = st.grad;
        return detail::search_and_update(st, objective, config, base, st.value, r, mu, info);
    }
    const ParamVector base = st.w + mu * st.v;
    const double base_value = objective.value(base);
    ++st.fev;
    ++info.fev;
    const ParamVector r = objective.gradient(base);
    ++st.gev;
    ++info.gev;
    return detail::search_and_update(st, objective, config, base, base_value, r, mu, info);
}

/// One L-MoQ iteration: the look-ahead gradient is replaced by
/// (1 + mu_k) grad_k - mu_k grad_{k-1}, so only grad_{k+1} is evaluated.
template <Objective F>
StepInfo step_lmoq(OptimizerState& st, const F& objective, const OptimizerConfig& config) {
    if (!detail::gate(st, config))
        return {};
    StepInfo info;
    const double mu = st.schedule.next();
    if (mu == 0.0 || !st.grad_prev) {
        const ParamVector base = st.w;
        const ParamVector r = st.grad;
        return detail::search_and_update(st, objective, config, base, st.value, r, mu, info);
    }
    const ParamVector base = st.w + mu * st.v;
    const double base_value = objective.value(base);
    ++st.fev;
    ++info.fev;
    const ParamVector r = (1.0 + mu) * st.grad - mu * *st.grad_prev;
    return detail::search_and_update(st, objective, config, base, base_value, r, mu, info);
}

template <Objective F>
StepInfo step(OptimizerKind kind, OptimizerState& st, const F& objective,
              const OptimizerConfig& config) {
    switch (kind) {
    case OptimizerKind::lbfgs: return step_lbfgs(st, objective, config);
    case OptimizerKind::lnaq: return step_lnaq(st, objective, config);
    case OptimizerKind::lmoq: return step_lmoq(st, objective, config);
    }
    throw std::invalid_argument("step: unknown optimizer kind");
}

struct TraceRow {
    long k;
    double value;
    double grad_norm;
    long fev;
    long gev;
    double elapsed_ms;
};

enum class RunStatus { converged, max_iterations, diverged, stalled };

inline std::string_view to_string(RunStatus s) {
    switch (s) {
    case RunStatus::converged: return "converged";
    case RunStatus::max_iterations: return "max_iterations";
    case RunStatus::diverged: return "diverged";
    case RunStatus::stalled: return "stalled";
    }
    return "?";
}

struct RunSummary {
    double final_value = 0.0;
    long iters = 0;
    long fev = 0;
    long gev = 0;
    double wall_seconds = 0.0;
    RunStatus status = RunStatus::max_iterations;
};

struct RunResult {
    std::vector<TraceRow> trace;  // k = 0 .. iters
    RunSummary summary;
    ParamVector w;                // final iterate
};

/// Iterates `kind` until |grad E(w_k)| <= epsilon or k = k_max. A nonfinite
/// loss or gradient ends the run with status `diverged` and the partial trace.
template <Objective F>
RunResult run(OptimizerKind kind, const F& objective, ParamVector w0,
              const OptimizerConfig& config) {
    using clock = std::chrono::steady_clock;
    const auto start = clock::now();
    auto elapsed_ms = [&] {
        return std::chrono::duration<double, std::milli>(clock::now() - start).count();
    };

    OptimizerState st = make_state(objective, std::move(w0), config);
    RunResult out;
    out.trace.push_back({0, st.value, st.grad_norm(), st.fev, st.gev, elapsed_ms()});

    RunStatus status = RunStatus::max_iterations;
    while (true) {
        if (st.diverged) {
            status = RunStatus::diverged;
            break;
        }
        if (st.grad_norm() <= config.epsilon) {
            status = RunStatus::converged;
            break;
        }
        if (st.k >= config.k_max)
            break;
        const StepInfo info = step(kind, st, objective, config);
        if (!info.taken) {
            status = st.diverged ? RunStatus::diverged : RunStatus::stalled;
            break;
        }
        out.trace.push_back({st.k, st.value, st.grad_norm(), st.fev, st.gev, elapsed_ms()});
    }

    out.summary = {st.value, st.k, st.fev, st.gev, elapsed_ms() / 1000.0, status};
    out.w = std::move(st.w);
    return out;
}

struct CostModel {
    double n;     // samples
    double d;     // parameters
    double m;     // memory size
    double zeta;  // mean line-search function evaluations per iteration
};

struct CostEstimate {
    double per_iteration;  // n d + 4 m d + 2 d + zeta n d
    double storage;        // (2 m + 1) d
};

inline CostEstimate theoretical_cost(const CostModel& c) {
    if (!(c.n > 0 && c.d > 0 && c.m > 0 && c.zeta > 0))
        throw std::invalid_argument("theoretical_cost: all fields must be positive");
    return {c.n * c.d + 4.0 * c.m * c.d + 2.0 * c.d + c.zeta * c.n * c.d,
            (2.0 * c.m + 1.0) * c.d};
}

/// E(w) = 1/2 w^T A w - b^T w.
struct QuadraticObjective {
    Eigen::MatrixXd A;
    ParamVector b;

    double value(const ParamVector& w) const { return 0.5 * w.dot(A * w) - b.dot(w); }
    ParamVector gradient(const ParamVector& w) const { return A * w - b; }
};

/// Random symmetric positive-definite quadratic with eigenvalues in [1, cond].
inline QuadraticObjective random_quadratic(Eigen::Index d, std::uint64_t seed, double cond = 100.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd m(d, d);
    for (Eigen::Index i = 0; i < m.size(); ++i)
        m.data()[i] = normal(rng);
    const Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    const Eigen::MatrixXd q = qr.householderQ();
    Eigen::VectorXd eig(d);
    for (Eigen::Index i = 0; i < d; ++i)
        eig[i] = d > 1 ? std::pow(cond, double(i) / double(d - 1)) : 1.0;
    ParamVector b(d);
    for (Eigen::Index i = 0; i < d; ++i)
        b[i] = normal(rng);
    return {q * eig.asDiagonal() * q.transpose(), b};
}

} // namespace lmoq
