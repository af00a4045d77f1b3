// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

// Plain list archive: every query is a linear scan. Slow, obviously correct,
// and kept as the reference the tree-backed Archive is tested against.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "casemix/archive/hypercube.hpp"
#include "casemix/common.hpp"

namespace casemix {

class ListArchive {
public:
    explicit ListArchive(std::size_t dims) : dims_(dims) {}
    explicit ListArchive(std::vector<Point> points)
        : dims_(points.empty() ? 0 : points.front().size()), points_(std::move(points)) {}

    std::size_t dimension() const noexcept { return dims_; }
    std::size_t size() const noexcept { return points_.size(); }
    const std::vector<Point>& points() const noexcept { return points_; }

    bool insert(const Point& p) {
        if (is_in(p)) return false;
        points_.push_back(p);
        return true;
    }

    bool erase(std::span<const double> p) {
        for (auto it = points_.begin(); it != points_.end(); ++it)
            if (same_point(*it, p)) {
                points_.erase(it);
                return true;
            }
        return false;
    }

    bool is_in(std::span<const double> p) const {
        for (const auto& q : points_)
            if (same_point(q, p)) return true;
        return false;
    }

    std::vector<Point> range_query(const Hypercube& h) const {
        std::vector<Point> out;
        for (const auto& q : points_)
            if (h.contains(q)) out.push_back(q);
        return out;
    }

    std::vector<Point> neighbours(std::span<const double> a, double radius) const {
        std::vector<Point> out;
        for (const auto& q : points_)
            if (!same_point(q, a) && squared_distance(q, a) <= radius * radius) out.push_back(q);
        return out;
    }

    std::optional<Point> nearest(std::span<const double> a) const {
        std::optional<Point> best;
        double best_d2 = 0.0;
        for (const auto& q : points_) {
            if (same_point(q, a)) continue;
            const double d2 = squared_distance(q, a);
            if (!best || d2 < best_d2) {
                best = q;
                best_d2 = d2;
            }
        }
        return best;
    }

    std::optional<double> find_min(std::size_t k) const {
        std::optional<double> m;
        for (const auto& q : points_)
            if (!m || q[k] < *m) m = q[k];
        return m;
    }

    std::optional<double> find_max(std::size_t k) const {
        std::optional<double> m;
        for (const auto& q : points_)
            if (!m || q[k] > *m) m = q[k];
        return m;
    }

    bool is_dominated(std::span<const double> a) const {
        for (const auto& q : points_)
            if (dominates(q, a)) return true;
        return false;
    }

    /// Pairwise filter over an arbitrary list.
    static std::vector<Point> find_non_dominated(std::span<const Point> points) {
        std::vector<Point> out;
        for (const auto& a : points) {
            bool dominated = false;
            for (const auto& b : points)
                if (dominates(b, a)) {
                    dominated = true;
                    break;
                }
            if (!dominated) out.push_back(a);
        }
        return out;
    }

private:
    std::size_t dims_;
    std::vector<Point> points_;
};

}  // namespace casemix
