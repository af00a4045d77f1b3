// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

// Pareto frontier store: the ordered point list plus a K-d tree over the same
// points. Single writer; const members are safe to call concurrently.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "casemix/archive/hypercube.hpp"
#include "casemix/archive/kd_tree.hpp"
#include "casemix/common.hpp"

namespace casemix {

enum class InsertOutcome { kInserted, kDuplicate };

class Archive {
public:
    using Tree = KdTree<double>;
    using Seq = Tree::Seq;

    explicit Archive(std::size_t dims = 0) : dims_(dims), tree_(dims) {}

    /// Balanced archive over `points`, keeping their order.
    static Archive make(std::vector<Point> points) {
        const std::size_t dims = points.empty() ? 0 : points.front().size();
        Archive a(dims);
        for (const auto& p : points) a.check(p);
        a.points_ = std::move(points);
        a.seqs_.resize(a.points_.size());
        for (std::size_t i = 0; i < a.seqs_.size(); ++i) a.seqs_[i] = i;
        a.next_seq_ = a.seqs_.size();
        a.rebuild();
        return a;
    }

    std::size_t dimension() const noexcept { return dims_; }
    std::size_t size() const noexcept { return points_.size(); }
    bool empty() const noexcept { return points_.empty(); }
    const std::vector<Point>& points() const noexcept { return points_; }
    const Point& point(std::size_t index) const { return points_.at(index); }
    std::size_t height() const { return tree_.height(); }

    void clear() {
        points_.clear();
        seqs_.clear();
        tree_.clear();
        ideal_.clear();
        nadir_.clear();
    }

    /// Rebalances the tree over the current list.
    void rebuild() {
        tree_ = Tree(dims_);
        tree_.build(points_, seqs_);
        refresh_extrema();
    }

    InsertOutcome insert(const Point& p) {
        if (dims_ == 0 && points_.empty()) {
            dims_ = p.size();
            tree_ = Tree(dims_);
        }
        check(p);
        if (is_in(p)) return InsertOutcome::kDuplicate;
        const Seq seq = next_seq_++;
        points_.push_back(p);
        seqs_.push_back(seq);
        tree_.insert(p, seq);
        if (ideal_.empty()) {
            ideal_ = p;
            nadir_ = p;
        } else {
            for (std::size_t k = 0; k < dims_; ++k) {
                ideal_[k] = std::max(ideal_[k], p[k]);
                nadir_[k] = std::min(nadir_[k], p[k]);
            }
        }
        return InsertOutcome::kInserted;
    }

    /// Removes the stored point equal to `p`; false when absent.
    bool erase(std::span<const double> p) {
        if (p.size() != dims_) throw_dimension(p.size());
        const auto seq = tree_.erase(p, kSamePointTolerance);
        if (!seq) return false;
        const std::size_t at = position_of(*seq);
        points_.erase(points_.begin() + static_cast<std::ptrdiff_t>(at));
        seqs_.erase(seqs_.begin() + static_cast<std::ptrdiff_t>(at));
        refresh_extrema();
        return true;
    }

    bool is_in(std::span<const double> p) const {
        if (p.size() != dims_) throw_dimension(p.size());
        return tree_.find(p, kSamePointTolerance).has_value();
    }

    /// Points inside the closed box, in list order.
    std::vector<Point> range_query(const Hypercube& h) const {
        std::vector<Point> out;
        for (std::size_t i : range_query_indices(h)) out.push_back(points_[i]);
        return out;
    }

    std::vector<std::size_t> range_query_indices(const Hypercube& h) const {
        if (h.dimension() != dims_) throw_dimension(h.dimension());
        std::vector<double> lo(dims_), hi(dims_);
        for (std::size_t k = 0; k < dims_; ++k) {
            lo[k] = h[k].lb;
            hi[k] = h[k].ub;
        }
        std::vector<Seq> seqs;
        tree_.range(lo, hi, [&](const Tree::Hit& hit) { seqs.push_back(hit.seq); });
        return positions(std::move(seqs));
    }

    /// Points within Euclidean `radius` of `a` (closed ball), excluding `a`.
    std::vector<Point> neighbours(std::span<const double> a, double radius) const {
        if (a.size() != dims_) throw_dimension(a.size());
        if (!(radius >= 0.0)) throw InputError("radius must be non-negative");
        std::vector<Seq> seqs;
        tree_.within(a, radius * radius, kSamePointTolerance, [&](const Tree::Hit& hit) { seqs.push_back(hit.seq); });
        std::vector<Point> out;
        for (std::size_t i : positions(std::move(seqs))) out.push_back(points_[i]);
        return out;
    }

    /// True when no stored point other than `a` lies within `radius`.
    bool no_close_neighbours(std::span<const double> a, double radius) const {
        if (a.size() != dims_) throw_dimension(a.size());
        bool found = false;
        tree_.within(a, radius * radius, kSamePointTolerance, [&](const Tree::Hit&) { found = true; });
        return !found;
    }

    /// Closest stored point different from `a`; earliest in the list on ties.
    std::optional<std::size_t> nearest_index(std::span<const double> a) const {
        if (a.size() != dims_) throw_dimension(a.size());
        const auto hit = tree_.nearest(a, kSamePointTolerance);
        if (!hit) return std::nullopt;
        return position_of(hit->seq);
    }

    std::optional<Point> nearest(std::span<const double> a) const {
        const auto i = nearest_index(a);
        if (!i) return std::nullopt;
        return points_[*i];
    }

    std::optional<double> find_min(std::size_t k) const {
        check_axis(k);
        return tree_.min_coordinate(k);
    }

    std::optional<double> find_max(std::size_t k) const {
        check_axis(k);
        return tree_.max_coordinate(k);
    }

    /// Whether some stored point is at least as good everywhere and better
    /// somewhere. Stops at the first such point.
    bool is_dominated(std::span<const double> a) const {
        if (a.size() != dims_) throw_dimension(a.size());
        return tree_.find_at_least(a, [&](std::span<const double> q) { return dominates(q, a); }).has_value();
    }

    /// Frontier box: per-dimension [min, max] over the archive.
    std::optional<Hypercube> bounds() const {
        if (points_.empty()) return std::nullopt;
        Hypercube h;
        for (std::size_t k = 0; k < dims_; ++k) h.intervals.push_back({nadir_[k], ideal_[k]});
        return h;
    }

    /// Component-wise best (maximum) and worst (minimum) points.
    const Point& ideal() const noexcept { return ideal_; }
    const Point& nadir() const noexcept { return nadir_; }

private:
    std::size_t dims_;
    std::vector<Point> points_;
    std::vector<Seq> seqs_;  // ascending, parallel to points_
    Seq next_seq_{0};
    Tree tree_;
    Point ideal_;
    Point nadir_;

    [[noreturn]] void throw_dimension(std::size_t got) const {
        throw InputError("expected " + std::to_string(dims_) + " coordinates, got " + std::to_string(got));
    }

    void check_axis(std::size_t k) const {
        if (k >= dims_) throw InputError("dimension " + std::to_string(k) + " out of range");
    }

    void check(const Point& p) const {
        if (p.size() != dims_) throw_dimension(p.size());
        for (double v : p)
            if (!std::isfinite(v)) throw InputError("point coordinates must be finite");
    }

    std::size_t position_of(Seq seq) const {
        return static_cast<std::size_t>(std::lower_bound(seqs_.begin(), seqs_.end(), seq) - seqs_.begin());
    }

    std::vector<std::size_t> positions(std::vector<Seq> seqs) const {
        std::sort(seqs.begin(), seqs.end());
        std::vector<std::size_t> out;
        out.reserve(seqs.size());
        for (Seq s : seqs) out.push_back(position_of(s));
        return out;
    }

    void refresh_extrema() {
        ideal_.clear();
        nadir_.clear();
        if (points_.empty()) return;
        for (std::size_t k = 0; k < dims_; ++k) {
            ideal_.push_back(*tree_.max_coordinate(k));
            nadir_.push_back(*tree_.min_coordinate(k));
        }
    }
};

/// Points of `points` not dominated by any other member, in input order.
/// Dominance tests run on `threads` workers (0: hardware concurrency).
inline std::vector<Point> find_non_dominated(std::span<const Point> points, unsigned threads = 0) {
    if (points.empty()) return {};
    const std::size_t dims = points.front().size();
    for (const auto& p : points)
        if (p.size() != dims) throw InputError("points have mixed dimensions");
    KdTree<double> tree(dims);
    std::vector<KdTree<double>::Seq> seqs(points.size());
    for (std::size_t i = 0; i < seqs.size(); ++i) seqs[i] = i;
    tree.build(points, seqs);

    std::vector<char> keep(points.size(), 0);
    auto work = [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const auto& a = points[i];
            keep[i] = !tree.find_at_least(a, [&](std::span<const double> q) { return dominates(q, a); }).has_value();
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, points.size()));
    if (threads <= 1) {
        work(0, points.size());
    } else {
        std::vector<std::jthread> pool;
        const std::size_t chunk = (points.size() + threads - 1) / threads;
        for (std::size_t b = 0; b < points.size(); b += chunk)
            pool.emplace_back(work, b, std::min(points.size(), b + chunk));
    }
    std::vector<Point> out;
    for (std::size_t i = 0; i < points.size(); ++i)
        if (keep[i]) out.push_back(points[i]);
    return out;
}

}  // namespace casemix
