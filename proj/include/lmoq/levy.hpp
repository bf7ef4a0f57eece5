#pragma once

#include "mlp.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>

namespace lmoq {

/// Levy test function
///   f(x) = (pi/n) { sum_{i<n} (x_i-1)^2 (1 + 10 sin^2(pi x_{i+1})) + 10 sin^2(pi x_1) + (x_n-1)^2 }
inline double levy_value(std::span<const double> x) {
    const std::size_t n = x.size();
    if (n < 2)
        throw std::invalid_argument("levy_value: need at least two coordinates");
    using std::numbers::pi;
    double sum = 0.0;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double s = std::sin(pi * x[i + 1]);
        sum += (x[i] - 1.0) * (x[i] - 1.0) * (1.0 + 10.0 * s * s);
    }
    const double s1 = std::sin(pi * x[0]);
    sum += 10.0 * s1 * s1 + (x[n - 1] - 1.0) * (x[n - 1] - 1.0);
    return pi / double(n) * sum;
}

struct LevySpec {
    int n_dims = 5;
    double box_low = -4.0;
    double box_high = 4.0;
    int n_samples = 1000;
    std::uint64_t seed = 0;

    void validate() const {
        if (n_dims < 2)
            throw std::invalid_argument("LevySpec: n_dims must be at least 2");
        if (!(box_low < box_high))
            throw std::invalid_argument("LevySpec: box_low must be below box_high");
        if (n_samples < 0)
            throw std::invalid_argument("LevySpec: n_samples must be nonnegative");
    }
};

/// Uniform i.i.d. samples over the box with Levy targets; deterministic per seed.
inline Dataset generate_dataset(const LevySpec& spec) {
    spec.validate();
    std::mt19937_64 rng(spec.seed);
    std::uniform_real_distribution<double> dist(spec.box_low, spec.box_high);
    Dataset data{SampleMatrix(spec.n_samples, spec.n_dims), SampleMatrix(spec.n_samples, 1)};
    for (int p = 0; p < spec.n_samples; ++p) {
        for (int i = 0; i < spec.n_dims; ++i)
            data.inputs(p, i) = dist(rng);
        data.targets(p, 0) = levy_value({data.inputs.row(p).data(), std::size_t(spec.n_dims)});
    }
    return data;
}

/// Affine map applied to the targets: stored = (raw - offset) / scale.
struct TargetScaling {
    double offset = 0.0;
    double scale = 1.0;
};

/// Maps the targets onto [0, 1] using their observed range. Returns the map;
/// a constant target column is only shifted.
inline TargetScaling minmax_scale_targets(Dataset& data) {
    if (data.size() == 0)
        return {};
    const double lo = data.targets.minCoeff();
    const double hi = data.targets.maxCoeff();
    const TargetScaling t{lo, hi > lo ? hi - lo : 1.0};
    data.targets = ((data.targets.array() - t.offset) / t.scale).matrix();
    return t;
}

/// One row per sample: x1..xn,target.
inline void write_dataset_csv(std::ostream& os, const Dataset& data) {
    char buf[32];
    for (Eigen::Index i = 0; i < data.inputs.cols(); ++i)
        os << 'x' << (i + 1) << ',';
    os << "target\n";
    for (Eigen::Index p = 0; p < data.size(); ++p) {
        for (Eigen::Index i = 0; i < data.inputs.cols(); ++i) {
            std::snprintf(buf, sizeof buf, "%.17g,", data.inputs(p, i));
            os << buf;
        }
        std::snprintf(buf, sizeof buf, "%.17g\n", data.targets(p, 0));
        os << buf;
    }
}

} // namespace lmoq
