#pragma once

#include "types.hpp"

#include <cmath>
#include <cstddef>
#include <deque>
#include <stdexcept>
#include <vector>

namespace lmoq {

struct CurvaturePair {
    ParamVector s;  // step displacement
    ParamVector y;  // gradient displacement
    double rho;     // 1 / (y^T s)
};

/// Bounded FIFO of curvature pairs. Applies the implicit L-BFGS inverse
/// Hessian to a vector through the two-loop recursion.
class LmemBuffer {
public:
    static constexpr double default_curvature_floor = 1e-10;

    explicit LmemBuffer(std::size_t capacity, double curvature_floor = default_curvature_floor)
        : capacity_(capacity), floor_(curvature_floor) {
        if (capacity == 0)
            throw std::invalid_argument("LmemBuffer: capacity must be positive");
    }

    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return pairs_.size(); }
    bool empty() const { return pairs_.empty(); }
    double h0_scale() const { return h0_scale_; }
    const std::deque<CurvaturePair>& pairs() const { return pairs_; }

    void clear() {
        pairs_.clear();
        h0_scale_ = 1.0;
    }

    /// Stores (s, y) if y^T s > floor * |s| |y|, evicting the oldest pair when
    /// full. Returns whether the pair was accepted.
    bool push_pair(const ParamVector& s, const ParamVector& y) {
        if (s.size() != y.size())
            throw std::invalid_argument("push_pair: s and y differ in dimension");
        if (!pairs_.empty() && s.size() != pairs_.front().s.size())
            throw std::invalid_argument("push_pair: dimension differs from stored pairs");
        const double ys = y.dot(s);
        const double yy = y.squaredNorm();
        if (!(ys > floor_ * s.norm() * std::sqrt(yy)) || !(yy > 0.0))
            return false;
        if (pairs_.size() == capacity_)
            pairs_.pop_front();
        pairs_.push_back({s, y, 1.0 / ys});
        h0_scale_ = ys / yy;
        return true;
    }

    /// Returns H r. With no stored pairs this is h0_scale * r.
    ParamVector two_loop(const ParamVector& r) const {
        if (!pairs_.empty() && r.size() != pairs_.front().s.size())
            throw std::invalid_argument("two_loop: dimension mismatch");
        ParamVector q = r;
        const std::size_t n = pairs_.size();
        std::vector<double> sigma(n);
        for (std::size_t i = n; i-- > 0;) {
            const auto& p = pairs_[i];
            sigma[i] = p.rho * p.s.dot(q);
            q.noalias() -= sigma[i] * p.y;
        }
        q *= h0_scale_;
        for (std::size_t i = 0; i < n; ++i) {
            const auto& p = pairs_[i];
            const double beta = p.rho * p.y.dot(q);
            q.noalias() += (sigma[i] - beta) * p.s;
        }
        return q;
    }

private:
    std::size_t capacity_;
    double floor_;
    double h0_scale_ = 1.0;
    std::deque<CurvaturePair> pairs_;
};

} // namespace lmoq
