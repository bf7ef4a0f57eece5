#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <cstring>
#include <span>

namespace lmoq {

/// Flat vector of optimization variables (network weights in the benchmark).
using ParamVector = Eigen::VectorXd;

/// Row-major n x k sample matrix.
using SampleMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

// 64-bit FNV-1a, used for run ids and input fingerprints.
inline std::uint64_t fnv1a(std::span<const unsigned char> bytes,
                           std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fingerprint(const double* data, std::size_t count,
                                 std::uint64_t h = 0xcbf29ce484222325ULL) {
    return fnv1a({reinterpret_cast<const unsigned char*>(data), count * sizeof(double)}, h);
}

} // namespace lmoq
