// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

// Planner-facing queries over an archive: range queries with the achievable
// box and a recommended point, goal checks against dominance regions, and
// the progress measure.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdio>
#include <limits>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "casemix/archive/archive.hpp"
#include "casemix/archive/hypercube.hpp"
#include "casemix/common.hpp"

namespace casemix::analytics {

inline constexpr std::size_t kDefaultAlternativeCap = 1000;

/// Coordinates scaled to [0, 1] by the frontier box. Dimensions with zero
/// width carry no information and are skipped (nullopt).
inline std::vector<std::optional<double>> normalize(std::span<const double> p, const Hypercube& frontier) {
    std::vector<std::optional<double>> out(p.size());
    for (std::size_t k = 0; k < p.size(); ++k) {
        const double w = frontier[k].ub - frontier[k].lb;
        if (w > 0.0) out[k] = (p[k] - frontier[k].lb) / w;
    }
    return out;
}

/// Copy of `points` in frontier-box units; zero-width dimensions map to 0.
inline std::vector<Point> normalize_points(std::span<const Point> points, const Hypercube& frontier) {
    std::vector<Point> out;
    out.reserve(points.size());
    for (const auto& p : points) {
        Point q(p.size(), 0.0);
        const auto n = normalize(p, frontier);
        for (std::size_t k = 0; k < p.size(); ++k) q[k] = n[k].value_or(0.0);
        out.push_back(std::move(q));
    }
    return out;
}

/// Percentage of the way from the nadir to the ideal point, measured on
/// normalized coordinates with the two-norm. Empty when the frontier box is
/// a single point.
inline std::optional<double> progress(std::span<const double> p, const Hypercube& frontier) {
    if (p.size() != frontier.dimension()) throw InputError("point and frontier box differ in dimension");
    const auto n = normalize(p, frontier);
    double gamma2 = 0.0, delta2 = 0.0;
    for (const auto& v : n) {
        if (!v) continue;
        gamma2 += 1.0;
        delta2 += (1.0 - *v) * (1.0 - *v);
    }
    if (gamma2 == 0.0) return std::nullopt;
    const double gamma = std::sqrt(gamma2);
    return 100.0 * (gamma - std::sqrt(delta2)) / gamma;
}

struct RangeQueryResult {
    Hypercube frontier;                   // box of the whole archive
    Hypercube requested;                  // request clamped to the frontier box
    bool clamped{false};                  // the request reached outside it
    std::vector<std::size_t> candidates;  // archive indices, list order
    std::optional<std::size_t> best;      // candidate closest to the ideal point
    std::optional<double> best_progress;
    std::optional<Hypercube> achievable;  // bounding box of the candidates
    double coverage_percent{0.0};
};

/// Members of the archive inside `request`. The request is clamped to the
/// frontier box for reporting; membership is the same either way.
inline RangeQueryResult range_query_ext(const Archive& archive, const Hypercube& request) {
    if (request.dimension() != archive.dimension())
        throw InputError("request has " + std::to_string(request.dimension()) + " intervals, archive has " +
                         std::to_string(archive.dimension()) + " objectives");
    request.validate();
    if (archive.empty()) throw InputError("archive is empty");
    RangeQueryResult r;
    r.frontier = *archive.bounds();
    r.requested = request;
    for (std::size_t k = 0; k < request.dimension(); ++k) {
        auto& iv = r.requested[k];
        const auto& pf = r.frontier[k];
        if (iv.lb < pf.lb || iv.ub > pf.ub) r.clamped = true;
        iv.lb = std::clamp(iv.lb, pf.lb, pf.ub);
        iv.ub = std::clamp(iv.ub, pf.lb, pf.ub);
    }
    r.candidates = archive.range_query_indices(request);
    r.coverage_percent = 100.0 * static_cast<double>(r.candidates.size()) / static_cast<double>(archive.size());
    if (r.candidates.empty()) return r;

    std::vector<Point> members;
    members.reserve(r.candidates.size());
    for (std::size_t i : r.candidates) members.push_back(archive.point(i));
    r.achievable = bounding_box(members);

    double best_d2 = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < members.size(); ++c) {
        double d2 = 0.0;
        for (const auto& v : normalize(members[c], r.frontier))
            if (v) d2 += (1.0 - *v) * (1.0 - *v);
        if (d2 < best_d2) {
            best_d2 = d2;
            r.best = r.candidates[c];
        }
    }
    r.best_progress = progress(archive.point(*r.best), r.frontier);
    return r;
}

/// Two decimals at most, trailing zeros dropped: 9, 45.5, 2420.72.
inline std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    std::string s(buf);
    if (s.find('.') != std::string::npos) {
        while (s.back() == '0') s.pop_back();
        if (s.back() == '.') s.pop_back();
    }
    if (s == "-0") s = "0";
    return s;
}

/// One line per objective showing frontier, requested and achievable
/// intervals as nested brackets. A bound equal to the next inner one is not
/// repeated; a level with both bounds repeated loses its brackets.
inline std::vector<std::string> render_nested_ranges(const Hypercube& frontier, const Hypercube& requested,
                                                     const std::optional<Hypercube>& achievable) {
    const std::size_t dims = frontier.dimension();
    if (requested.dimension() != dims || (achievable && achievable->dimension() != dims))
        throw InputError("nested ranges need boxes of equal dimension");
    std::vector<std::string> lines;
    for (std::size_t k = 0; k < dims; ++k) {
        std::vector<Interval> levels{frontier[k], requested[k]};
        if (achievable) levels.push_back((*achievable)[k]);
        for (std::size_t i = 0; i + 1 < levels.size(); ++i)
            if (!(levels[i].lb <= levels[i + 1].lb && levels[i + 1].ub <= levels[i].ub))
                throw std::logic_error("nested ranges out of order in dimension " + std::to_string(k));
        if (levels.back().lb > levels.back().ub)
            throw std::logic_error("inverted interval in dimension " + std::to_string(k));

        std::string text = "[" + format_number(levels.back().lb) + ", " + format_number(levels.back().ub) + "]";
        for (std::size_t i = levels.size() - 1; i-- > 0;) {
            const bool show_lb = levels[i].lb != levels[i + 1].lb;
            const bool show_ub = levels[i].ub != levels[i + 1].ub;
            if (!show_lb && !show_ub) continue;
            text = "[" + (show_lb ? format_number(levels[i].lb) + ", " : std::string()) + text +
                   (show_ub ? ", " + format_number(levels[i].ub) : std::string()) + "]";
        }
        lines.push_back(std::move(text));
    }
    return lines;
}

struct OptimalityVerdict {
    bool dominated{false};
    // Dominated: archive points strictly better than the goal. Otherwise:
    // archive points the goal weakly dominates (achievable, but no better).
    std::vector<std::size_t> alternatives;  // capped, list order
    std::size_t alternative_count{0};       // before the cap
    std::optional<std::size_t> closest;     // nearest other archive member
    std::vector<double> change;             // closest - goal
};

inline OptimalityVerdict check_optimality(const Archive& archive, std::span<const double> goal,
                                          std::size_t cap = kDefaultAlternativeCap) {
    if (goal.size() != archive.dimension())
        throw InputError("goal has " + std::to_string(goal.size()) + " values, archive has " +
                         std::to_string(archive.dimension()) + " objectives");
    for (double v : goal)
        if (!std::isfinite(v)) throw InputError("goal values must be finite");
    OptimalityVerdict v;
    if (archive.empty()) return v;
    constexpr double inf = std::numeric_limits<double>::infinity();
    Hypercube region;
    v.dominated = archive.is_dominated(goal);
    for (double g : goal) region.intervals.push_back(v.dominated ? Interval{g, inf} : Interval{-inf, g});
    for (std::size_t i : archive.range_query_indices(region)) {
        const auto& p = archive.point(i);
        const bool keep = v.dominated ? dominates(p, goal) : !same_point(p, goal);
        if (!keep) continue;
        ++v.alternative_count;
        if (v.alternatives.size() < cap) v.alternatives.push_back(i);
    }
    if (!v.dominated) {
        v.closest = archive.nearest_index(goal);
        if (v.closest) {
            const auto& c = archive.point(*v.closest);
            for (std::size_t k = 0; k < goal.size(); ++k) v.change.push_back(c[k] - goal[k]);
        }
    }
    return v;
}

}  // namespace casemix::analytics
