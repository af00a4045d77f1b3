// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

// Brute-force checks on generated archives, shared by the unit tests and the
// acceptance gate.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "casemix/archive/archive.hpp"
#include "casemix/cam/model.hpp"

namespace casemix::testing {

/// Largest constraint violation over the archive, each point checked by
/// re-solving for an allocation that produces exactly its outputs. The
/// shortfall (how far the point is from producible) counts as a violation.
inline double worst_residual(const cam::CamModel& m, const Archive& a) {
    double worst = 0.0;
    for (const auto& p : a.points()) {
        const auto [shortfall, alloc] = cam::feasibility_shortfall(m, p);
        worst = std::max({worst, shortfall, cam::residuals(m, alloc).worst()});
    }
    return worst;
}

/// Number of ordered pairs (i, j) where point i dominates point j.
inline std::size_t dominated_pairs(const std::vector<Point>& pts) {
    std::size_t n = 0;
    for (const auto& a : pts)
        for (const auto& b : pts) n += dominates(a, b);
    return n;
}

inline double min_pairwise_distance(const std::vector<Point>& pts) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pts.size(); ++i)
        for (std::size_t j = i + 1; j < pts.size(); ++j) best = std::min(best, squared_distance(pts[i], pts[j]));
    return std::sqrt(best);
}

}  // namespace casemix::testing
