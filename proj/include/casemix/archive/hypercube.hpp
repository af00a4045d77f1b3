// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "casemix/common.hpp"

namespace casemix {

struct Interval {
    double lb{0.0};
    double ub{0.0};

    bool contains(double v) const noexcept { return lb <= v && v <= ub; }
    bool operator==(const Interval&) const = default;
};

/// Closed axis-aligned box, one interval per objective.
struct Hypercube {
    std::vector<Interval> intervals;

    Hypercube() = default;
    explicit Hypercube(std::vector<Interval> iv) : intervals(std::move(iv)) {}

    static Hypercube from_bounds(std::span<const double> low, std::span<const double> high) {
        if (low.size() != high.size())
            throw InputError("hypercube bounds have " + std::to_string(low.size()) + " and " +
                             std::to_string(high.size()) + " entries");
        Hypercube h;
        for (std::size_t k = 0; k < low.size(); ++k) h.intervals.push_back({low[k], high[k]});
        h.validate();
        return h;
    }

    /// Unbounded in every direction.
    static Hypercube everything(std::size_t dims) {
        constexpr double inf = std::numeric_limits<double>::infinity();
        return Hypercube(std::vector<Interval>(dims, Interval{-inf, inf}));
    }

    std::size_t dimension() const noexcept { return intervals.size(); }
    const Interval& operator[](std::size_t k) const { return intervals[k]; }
    Interval& operator[](std::size_t k) { return intervals[k]; }

    void validate() const {
        for (std::size_t k = 0; k < intervals.size(); ++k) {
            const auto& iv = intervals[k];
            if (std::isnan(iv.lb) || std::isnan(iv.ub)) throw InputError("hypercube bound is NaN");
            if (iv.lb > iv.ub)
                throw InputError("hypercube dimension " + std::to_string(k) + " has lower bound above upper bound");
        }
    }

    bool contains(std::span<const double> p) const noexcept {
        if (p.size() != intervals.size()) return false;
        for (std::size_t k = 0; k < p.size(); ++k)
            if (!intervals[k].contains(p[k])) return false;
        return true;
    }

    bool operator==(const Hypercube&) const = default;
};

/// Tight bounding box of a non-empty point set.
inline Hypercube bounding_box(std::span<const Point> points) {
    if (points.empty()) return {};
    Hypercube h;
    for (double v : points.front()) h.intervals.push_back({v, v});
    for (const auto& p : points)
        for (std::size_t k = 0; k < p.size(); ++k) {
            h[k].lb = std::min(h[k].lb, p[k]);
            h[k].ub = std::max(h[k].ub, p[k]);
        }
    return h;
}

}  // namespace casemix
