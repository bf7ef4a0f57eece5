#include <lmoq/linesearch.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace {

using lmoq::backtracking_search;
using lmoq::LineSearchConfig;
using lmoq::LineSearchStatus;

TEST(Backtracking, UnitStepAcceptedOnParabola) {
    int calls = 0;
    auto phi = [&](double a) {
        ++calls;
        return (a - 1.0) * (a - 1.0);
    };
    const auto r = backtracking_search(phi, 1.0, -2.0);
    EXPECT_EQ(r.status, LineSearchStatus::accepted);
    EXPECT_EQ(r.alpha, 1.0);
    EXPECT_EQ(r.value, 0.0);
    EXPECT_EQ(r.fev_used, 1);
    EXPECT_EQ(calls, 1);
}

TEST(Backtracking, HalvesOnce) {
    // phi(1) = 0.25 > 0.25 - 1e-3; phi(0.5) = 0 passes.
    int calls = 0;
    auto phi = [&](double a) {
        ++calls;
        return (a - 0.5) * (a - 0.5);
    };
    const auto r = backtracking_search(phi, 0.25, -1.0);
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.alpha, 0.5);
    EXPECT_EQ(r.fev_used, 2);
    EXPECT_EQ(calls, 2);
}

TEST(Backtracking, ExhaustsOnConstant) {
    LineSearchConfig cfg;
    int calls = 0;
    auto phi = [&](double) {
        ++calls;
        return 3.0;
    };
    const auto r = backtracking_search(phi, 3.0, -1.0, cfg);
    EXPECT_EQ(r.status, LineSearchStatus::exhausted);
    EXPECT_EQ(r.fev_used, cfg.max_backtracks + 1);
    EXPECT_EQ(calls, r.fev_used);
    EXPECT_DOUBLE_EQ(r.alpha, std::ldexp(1.0, -cfg.max_backtracks));
}

TEST(Backtracking, NonfiniteTrialsBacktrack) {
    auto phi = [](double a) { return a > 0.3 ? NAN : -a; };
    const auto r = backtracking_search(phi, 0.0, -1.0);
    EXPECT_TRUE(r.ok());
    EXPECT_EQ(r.alpha, 0.25);
    EXPECT_EQ(r.fev_used, 3);
}

TEST(Backtracking, RejectsNonDescent) {
    auto phi = [](double a) { return a; };
    EXPECT_THROW(backtracking_search(phi, 0.0, 0.0), std::invalid_argument);
    EXPECT_THROW(backtracking_search(phi, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(backtracking_search(phi, 0.0, NAN), std::invalid_argument);
}

TEST(Backtracking, RejectsBadConfig) {
    auto phi = [](double a) { return -a; };
    LineSearchConfig cfg;
    cfg.armijo_c = 1.0;
    EXPECT_THROW(backtracking_search(phi, 0.0, -1.0, cfg), std::invalid_argument);
    cfg = {};
    cfg.backtrack_factor = 0.0;
    EXPECT_THROW(backtracking_search(phi, 0.0, -1.0, cfg), std::invalid_argument);
    cfg = {};
    cfg.alpha_init = -1.0;
    EXPECT_THROW(backtracking_search(phi, 0.0, -1.0, cfg), std::invalid_argument);
}

// Random smooth 1-D functions: the count is exact and an accepted step
// satisfies the sufficient-decrease inequality.
TEST(Backtracking, ArmijoHoldsOnAcceptedSteps) {
    for (int i = 1; i <= 200; ++i) {
        const double a = 0.1 * i, b = 0.05 * (i % 17), c = 1.0 + i % 5;
        auto f = [&](double t) { return a * t * t - c * t + b * std::sin(7.0 * t); };
        const double phi0 = f(0.0);
        const double dphi0 = -c + 7.0 * b;
        if (dphi0 >= 0.0)
            continue;
        int calls = 0;
        auto phi = [&](double t) {
            ++calls;
            return f(t);
        };
        LineSearchConfig cfg;
        const auto r = backtracking_search(phi, phi0, dphi0, cfg);
        ASSERT_EQ(calls, r.fev_used);
        if (r.ok()) {
            ASSERT_LE(r.value, phi0 + cfg.armijo_c * r.alpha * dphi0);
        }
    }
}

} // namespace
