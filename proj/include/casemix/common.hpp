// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace casemix {

/// A point in objective space: one coordinate per patient group.
using Point = std::vector<double>;

/// Malformed caller input (dimension mismatch, unknown identifiers, ...).
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A model that is well-formed but cannot be used as configured
/// (e.g. an unbounded single-group maximization).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An LP solve failed where the caller required an optimum.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Unparseable or inconsistent file contents.
class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kSamePointTolerance = 1e-12;

inline bool same_point(std::span<const double> a, std::span<const double> b,
                       double tol = kSamePointTolerance) noexcept {
    if (a.size() != b.size()) return false;
    for (std::size_t k = 0; k < a.size(); ++k)
        if (std::abs(a[k] - b[k]) > tol) return false;
    return true;
}

inline double squared_distance(std::span<const double> a, std::span<const double> b) noexcept {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double d = a[k] - b[k];
        s += d * d;
    }
    return s;
}

/// Maximization dominance: `a` is no worse than `b` everywhere and strictly
/// better somewhere.
inline bool dominates(std::span<const double> a, std::span<const double> b) noexcept {
    bool better = false;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (a[k] < b[k]) return false;
        if (a[k] > b[k]) better = true;
    }
    return better;
}

}  // namespace casemix
