// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

// Per-objective summaries of an archive: spacing of sorted coordinates
// (uniformity), mean and quartiles (spread), and display histograms.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "casemix/common.hpp"

namespace casemix::analytics {

struct GapStats {
    double mean{0.0};
    double stddev{0.0};           // population form over the N-1 gaps
    std::optional<double> cv;     // stddev / mean, only when mean > 0
    double max_gap{0.0};
};

struct SpreadStats {
    double mean{0.0};
    double min{0.0};
    double q1{0.0};
    double median{0.0};
    double q3{0.0};
    double max{0.0};
};

namespace detail {

inline std::vector<double> sorted_column(std::span<const Point> points, std::size_t k) {
    std::vector<double> v;
    v.reserve(points.size());
    for (const auto& p : points) v.push_back(p[k]);
    std::sort(v.begin(), v.end());
    return v;
}

inline void check_dims(std::span<const Point> points) {
    const std::size_t dims = points.front().size();
    for (const auto& p : points)
        if (p.size() != dims) throw InputError("points have mixed dimensions");
}

}  // namespace detail

/// Gap statistics of one sorted coordinate list (size >= 2).
inline GapStats gap_stats(std::span<const double> sorted) {
    GapStats s;
    const std::size_t gaps = sorted.size() - 1;
    double sum = 0.0;
    for (std::size_t i = 0; i < gaps; ++i) {
        const double g = sorted[i + 1] - sorted[i];
        sum += g;
        s.max_gap = std::max(s.max_gap, g);
    }
    s.mean = sum / static_cast<double>(gaps);
    double ss = 0.0;
    for (std::size_t i = 0; i < gaps; ++i) {
        const double d = (sorted[i + 1] - sorted[i]) - s.mean;
        ss += d * d;
    }
    s.stddev = std::sqrt(ss / static_cast<double>(gaps));
    if (s.mean > 0.0) s.cv = s.stddev / s.mean;
    return s;
}

/// Uniformity per dimension; empty optional when fewer than two points.
/// Depends only on the multiset of each coordinate, not on archive order.
inline std::optional<std::vector<GapStats>> analyse_uniformity(std::span<const Point> points) {
    if (points.size() < 2) return std::nullopt;
    detail::check_dims(points);
    std::vector<GapStats> out;
    for (std::size_t k = 0; k < points.front().size(); ++k) out.push_back(gap_stats(detail::sorted_column(points, k)));
    return out;
}

/// Quantile by linear interpolation between closest ranks: position
/// h = (n - 1) p on the sorted list.
inline double quantile(std::span<const double> sorted, double p) {
    const double h = static_cast<double>(sorted.size() - 1) * p;
    const std::size_t lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

inline SpreadStats spread_stats(std::span<const double> sorted) {
    SpreadStats s;
    double sum = 0.0;
    for (double v : sorted) sum += v;
    s.mean = sum / static_cast<double>(sorted.size());
    s.min = sorted.front();
    s.max = sorted.back();
    s.q1 = quantile(sorted, 0.25);
    s.median = quantile(sorted, 0.5);
    s.q3 = quantile(sorted, 0.75);
    return s;
}

inline std::optional<std::vector<SpreadStats>> analyse_spread(std::span<const Point> points) {
    if (points.empty()) return std::nullopt;
    detail::check_dims(points);
    std::vector<SpreadStats> out;
    for (std::size_t k = 0; k < points.front().size(); ++k) out.push_back(spread_stats(detail::sorted_column(points, k)));
    return out;
}

struct Histogram {
    double lo{0.0};
    double hi{0.0};
    std::vector<std::size_t> counts;
};

/// Equal-width bins over [min, max] of dimension k; the top edge falls in
/// the last bin. A degenerate range puts everything in the first bin.
inline Histogram histogram(std::span<const Point> points, std::size_t k, std::size_t bins = 20) {
    Histogram h;
    h.counts.assign(bins, 0);
    if (points.empty() || bins == 0) return h;
    h.lo = h.hi = points.front()[k];
    for (const auto& p : points) {
        h.lo = std::min(h.lo, p[k]);
        h.hi = std::max(h.hi, p[k]);
    }
    const double width = h.hi - h.lo;
    for (const auto& p : points) {
        std::size_t b = 0;
        if (width > 0.0) b = std::min(bins - 1, static_cast<std::size_t>((p[k] - h.lo) / width * static_cast<double>(bins)));
        ++h.counts[b];
    }
    return h;
}

}  // namespace casemix::analytics
