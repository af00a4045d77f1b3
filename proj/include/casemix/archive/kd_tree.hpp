// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

// K-d tree over points of a fixed dimension. Split dimension cycles with
// depth. Each node carries a sequence number assigned by the owner so that
// results can be reported in insertion order.
//
// Invariant at a node splitting on k: left[k] <= node[k] <= right[k]. Insert
// sends ties right; a balanced build may leave ties on either side, so every
// search descends both ways when the split coordinate is equal.

#include <algorithm>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace casemix {

template <std::floating_point Scalar = double>
class KdTree {
public:
    using Seq = std::uint64_t;

    struct Hit {
        Seq seq;
        std::span<const Scalar> point;
    };

    explicit KdTree(std::size_t dims = 0) : dims_(dims) {}

    std::size_t dimension() const noexcept { return dims_; }
    std::size_t size() const noexcept { return size_; }
    bool empty() const noexcept { return size_ == 0; }

    void clear() noexcept {
        coords_.clear();
        nodes_.clear();
        free_.clear();
        root_ = kNil;
        size_ = 0;
    }

    /// Replaces the contents with a balanced tree: median split on the
    /// cycling dimension, so height is ceil(log2(n + 1)).
    void build(std::span<const std::vector<Scalar>> points, std::span<const Seq> seqs) {
        clear();
        nodes_.reserve(points.size());
        coords_.reserve(points.size() * dims_);
        for (std::size_t i = 0; i < points.size(); ++i) allocate(points[i], seqs[i]);
        std::vector<Index> order(points.size());
        std::iota(order.begin(), order.end(), Index{0});
        root_ = build_range(order, 0, order.size(), 0, kNil);
        size_ = points.size();
    }

    void insert(std::span<const Scalar> p, Seq seq) {
        const Index fresh = allocate(p, seq);
        ++size_;
        if (root_ == kNil) {
            root_ = fresh;
            return;
        }
        Index n = root_;
        std::size_t depth = 0;
        for (;;) {
            const std::size_t k = depth % dims_;
            Index& next = p[k] < coord(n, k) ? nodes_[n].left : nodes_[n].right;
            if (next == kNil) {
                next = fresh;
                nodes_[fresh].parent = n;
                return;
            }
            n = next;
            ++depth;
        }
    }

    /// Removes one stored point within `tol` of `p` per coordinate. Returns
    /// the removed point's sequence number.
    std::optional<Seq> erase(std::span<const Scalar> p, Scalar tol) {
        const auto found = locate(root_, 0, p, tol);
        if (!found) return std::nullopt;
        const Seq seq = nodes_[found->first].seq;
        remove_at(found->first, found->second);
        --size_;
        return seq;
    }

    std::optional<Seq> find(std::span<const Scalar> p, Scalar tol) const {
        const auto n = locate(root_, 0, p, tol);
        if (!n) return std::nullopt;
        return nodes_[n->first].seq;
    }

    std::size_t height() const { return height_of(root_); }

    /// Visits every point inside the closed box [lo, hi].
    template <class Visit>
    void range(std::span<const Scalar> lo, std::span<const Scalar> hi, Visit&& visit) const {
        range_of(root_, 0, lo, hi, visit);
    }

    /// Points with squared distance <= r2, excluding those within `tol` of `q`.
    template <class Visit>
    void within(std::span<const Scalar> q, Scalar r2, Scalar tol, Visit&& visit) const {
        within_of(root_, 0, q, r2, tol, visit);
    }

    /// Closest point not within `tol` of `q`; ties go to the lower sequence.
    std::optional<Hit> nearest(std::span<const Scalar> q, Scalar tol) const {
        Index best = kNil;
        Scalar best_d2 = std::numeric_limits<Scalar>::infinity();
        nearest_of(root_, 0, q, tol, best, best_d2);
        if (best == kNil) return std::nullopt;
        return Hit{nodes_[best].seq, point(best)};
    }

    std::optional<Scalar> min_coordinate(std::size_t k) const {
        const Index n = extreme_node(root_, 0, k, true);
        if (n == kNil) return std::nullopt;
        return coord(n, k);
    }

    std::optional<Scalar> max_coordinate(std::size_t k) const {
        const Index n = extreme_node(root_, 0, k, false);
        if (n == kNil) return std::nullopt;
        return coord(n, k);
    }

    /// First stored point satisfying `pred` among those with every coordinate
    /// >= q; used for dominance tests (maximization).
    template <class Pred>
    std::optional<Hit> find_at_least(std::span<const Scalar> q, Pred&& pred) const {
        const Index n = at_least_of(root_, 0, q, pred);
        if (n == kNil) return std::nullopt;
        return Hit{nodes_[n].seq, point(n)};
    }

    template <class Visit>
    void for_each(Visit&& visit) const {
        for_each_of(root_, visit);
    }

private:
    using Index = std::uint32_t;
    static constexpr Index kNil = std::numeric_limits<Index>::max();

    struct Node {
        Seq seq;
        Index left{kNil};
        Index right{kNil};
        Index parent{kNil};
    };

    std::size_t dims_;
    std::vector<Scalar> coords_;  // dims_ values per node slot
    std::vector<Node> nodes_;
    std::vector<Index> free_;
    Index root_{kNil};
    std::size_t size_{0};

    Scalar coord(Index n, std::size_t k) const noexcept { return coords_[std::size_t{n} * dims_ + k]; }
    std::span<const Scalar> point(Index n) const noexcept { return {coords_.data() + std::size_t{n} * dims_, dims_}; }

    Index allocate(std::span<const Scalar> p, Seq seq) {
        Index n;
        if (!free_.empty()) {
            n = free_.back();
            free_.pop_back();
            nodes_[n] = Node{seq};
            std::copy(p.begin(), p.end(), coords_.begin() + static_cast<std::ptrdiff_t>(std::size_t{n} * dims_));
        } else {
            n = static_cast<Index>(nodes_.size());
            nodes_.push_back(Node{seq});
            coords_.insert(coords_.end(), p.begin(), p.end());
        }
        return n;
    }

    Index build_range(std::vector<Index>& order, std::size_t lo, std::size_t hi, std::size_t depth, Index parent) {
        if (lo >= hi) return kNil;
        const std::size_t k = depth % dims_;
        const std::size_t mid = lo + (hi - lo) / 2;
        std::nth_element(order.begin() + static_cast<std::ptrdiff_t>(lo), order.begin() + static_cast<std::ptrdiff_t>(mid),
                         order.begin() + static_cast<std::ptrdiff_t>(hi), [&](Index a, Index b) {
                             const Scalar ca = coord(a, k), cb = coord(b, k);
                             return ca < cb || (ca == cb && nodes_[a].seq < nodes_[b].seq);
                         });
        const Index n = order[mid];
        nodes_[n].parent = parent;
        nodes_[n].left = build_range(order, lo, mid, depth + 1, n);
        nodes_[n].right = build_range(order, mid + 1, hi, depth + 1, n);
        return n;
    }

    static bool close(std::span<const Scalar> a, std::span<const Scalar> b, Scalar tol) noexcept {
        for (std::size_t k = 0; k < a.size(); ++k) {
            const Scalar d = a[k] - b[k];
            if (d > tol || d < -tol) return false;
        }
        return true;
    }

    std::optional<std::pair<Index, std::size_t>> locate(Index n, std::size_t depth, std::span<const Scalar> p,
                                                        Scalar tol) const {
        while (n != kNil) {
            if (close(point(n), p, tol)) return std::pair{n, depth};
            const std::size_t k = depth % dims_;
            const Scalar c = coord(n, k);
            const bool go_left = p[k] - tol <= c;
            const bool go_right = p[k] + tol >= c;
            if (go_left && go_right) {
                if (auto l = locate(nodes_[n].left, depth + 1, p, tol)) return l;
                n = nodes_[n].right;
            } else {
                n = go_left ? nodes_[n].left : nodes_[n].right;
            }
            ++depth;
        }
        return std::nullopt;
    }

    // Deletes the point held in slot `n`, which sits at `depth`. An inner
    // node takes over the point of its successor on the split (min of the
    // right subtree, else max of the left), and the donor slot is deleted in
    // turn, until a leaf is unlinked.
    void remove_at(Index n, std::size_t depth) {
        for (;;) {
            Node& node = nodes_[n];
            if (node.left == kNil && node.right == kNil) {
                if (node.parent == kNil)
                    root_ = kNil;
                else if (nodes_[node.parent].left == n)
                    nodes_[node.parent].left = kNil;
                else
                    nodes_[node.parent].right = kNil;
                free_.push_back(n);
                return;
            }
            const std::size_t k = depth % dims_;
            const Index donor = node.right != kNil ? extreme_node(node.right, depth + 1, k, true)
                                                   : extreme_node(node.left, depth + 1, k, false);
            std::copy_n(coords_.begin() + static_cast<std::ptrdiff_t>(std::size_t{donor} * dims_), dims_,
                        coords_.begin() + static_cast<std::ptrdiff_t>(std::size_t{n} * dims_));
            node.seq = nodes_[donor].seq;
            for (Index up = donor; up != n; up = nodes_[up].parent) ++depth;
            n = donor;
        }
    }

    Index extreme_node(Index n, std::size_t depth, std::size_t k, bool want_min) const {
        if (n == kNil) return kNil;
        const std::size_t split = depth % dims_;
        Index best = n;
        auto better = [&](Index c) {
            if (c == kNil) return;
            const Scalar a = coord(c, k), b = coord(best, k);
            if (want_min ? a < b : a > b) best = c;
        };
        if (split == k) {
            // Only one side can improve on this node.
            better(extreme_node(want_min ? nodes_[n].left : nodes_[n].right, depth + 1, k, want_min));
        } else {
            better(extreme_node(nodes_[n].left, depth + 1, k, want_min));
            better(extreme_node(nodes_[n].right, depth + 1, k, want_min));
        }
        return best;
    }

    std::size_t height_of(Index n) const {
        if (n == kNil) return 0;
        return 1 + std::max(height_of(nodes_[n].left), height_of(nodes_[n].right));
    }

    template <class Visit>
    void range_of(Index n, std::size_t depth, std::span<const Scalar> lo, std::span<const Scalar> hi, Visit& visit) const {
        while (n != kNil) {
            const auto p = point(n);
            bool inside = true;
            for (std::size_t k = 0; k < dims_ && inside; ++k) inside = lo[k] <= p[k] && p[k] <= hi[k];
            if (inside) visit(Hit{nodes_[n].seq, p});
            const std::size_t k = depth % dims_;
            const bool go_left = lo[k] <= p[k];
            const bool go_right = hi[k] >= p[k];
            if (go_left && go_right) range_of(nodes_[n].left, depth + 1, lo, hi, visit);
            n = go_right ? nodes_[n].right : go_left ? nodes_[n].left : kNil;
            ++depth;
        }
    }

    template <class Visit>
    void within_of(Index n, std::size_t depth, std::span<const Scalar> q, Scalar r2, Scalar tol, Visit& visit) const {
        if (n == kNil) return;
        const auto p = point(n);
        Scalar d2 = 0;
        for (std::size_t k = 0; k < dims_; ++k) {
            const Scalar d = q[k] - p[k];
            d2 += d * d;
        }
        if (d2 <= r2 && !close(p, q, tol)) visit(Hit{nodes_[n].seq, p});
        const std::size_t k = depth % dims_;
        const Scalar diff = q[k] - p[k];
        // Left points have coordinate <= p[k]; they can be close only if the
        // query is not far to the right, and symmetrically.
        if (diff <= 0 || diff * diff <= r2) within_of(nodes_[n].left, depth + 1, q, r2, tol, visit);
        if (diff >= 0 || diff * diff <= r2) within_of(nodes_[n].right, depth + 1, q, r2, tol, visit);
    }

    void nearest_of(Index n, std::size_t depth, std::span<const Scalar> q, Scalar tol, Index& best, Scalar& best_d2) const {
        if (n == kNil) return;
        const auto p = point(n);
        if (!close(p, q, tol)) {
            Scalar d2 = 0;
            for (std::size_t k = 0; k < dims_; ++k) {
                const Scalar d = q[k] - p[k];
                d2 += d * d;
            }
            if (d2 < best_d2 || (d2 == best_d2 && best != kNil && nodes_[n].seq < nodes_[best].seq)) {
                best = n;
                best_d2 = d2;
            }
        }
        const std::size_t k = depth % dims_;
        const Scalar diff = q[k] - p[k];
        const Index near_side = diff < 0 ? nodes_[n].left : nodes_[n].right;
        const Index far_side = diff < 0 ? nodes_[n].right : nodes_[n].left;
        nearest_of(near_side, depth + 1, q, tol, best, best_d2);
        // `<=` keeps equal-distance candidates reachable for the tie rule.
        if (diff * diff <= best_d2) nearest_of(far_side, depth + 1, q, tol, best, best_d2);
    }

    template <class Pred>
    Index at_least_of(Index n, std::size_t depth, std::span<const Scalar> q, Pred& pred) const {
        while (n != kNil) {
            const auto p = point(n);
            bool ge = true;
            for (std::size_t k = 0; k < dims_ && ge; ++k) ge = p[k] >= q[k];
            if (ge && pred(p)) return n;
            const std::size_t k = depth % dims_;
            // Left points are <= p[k]; they may still reach q[k] only if p[k] does.
            if (p[k] >= q[k]) {
                const Index l = at_least_of(nodes_[n].left, depth + 1, q, pred);
                if (l != kNil) return l;
            }
            n = nodes_[n].right;
            ++depth;
        }
        return kNil;
    }

    template <class Visit>
    void for_each_of(Index n, Visit& visit) const {
        if (n == kNil) return;
        visit(Hit{nodes_[n].seq, point(n)});
        for_each_of(nodes_[n].left, visit);
        for_each_of(nodes_[n].right, visit);
    }
};

}  // namespace casemix
