// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "casemix/common.hpp"

namespace casemix::lp {

enum class Sense { kMaximize, kMinimize };

enum class Relation { kLessEqual, kGreaterEqual, kEqual };

/// A dense row: coefficients over every variable, a relation and a right-hand side.
struct Constraint {
    std::vector<double> coefficients;
    Relation relation{Relation::kLessEqual};
    double rhs{0.0};
};

/// optimize c.x + offset  s.t.  A x {<=,>=,=} b,  x >= 0.
class LinearProgram {
public:
    explicit LinearProgram(std::size_t variable_count = 0, Sense sense = Sense::kMaximize)
        : sense_(sense), objective_(variable_count, 0.0) {}

    std::size_t variable_count() const noexcept { return objective_.size(); }
    std::size_t constraint_count() const noexcept { return constraints_.size(); }

    Sense sense() const noexcept { return sense_; }
    void set_sense(Sense s) noexcept { sense_ = s; }

    const std::vector<double>& objective() const noexcept { return objective_; }
    double objective_offset() const noexcept { return offset_; }

    void set_objective(std::vector<double> c, double offset = 0.0) {
        objective_ = std::move(c);
        offset_ = offset;
    }
    void set_objective_coefficient(std::size_t j, double v) { objective_.at(j) = v; }
    void set_objective_offset(double offset) noexcept { offset_ = offset; }
    void clear_objective() {
        std::fill(objective_.begin(), objective_.end(), 0.0);
        offset_ = 0.0;
    }

    /// Grows the variable space; existing rows are zero-padded.
    std::size_t add_variables(std::size_t count) {
        const std::size_t first = objective_.size();
        objective_.resize(first + count, 0.0);
        for (auto& c : constraints_) c.coefficients.resize(objective_.size(), 0.0);
        return first;
    }

    void add_constraint(std::vector<double> coefficients, Relation relation, double rhs) {
        constraints_.push_back({std::move(coefficients), relation, rhs});
    }

    /// Convenience for sparse construction: `terms` are (variable, coefficient) pairs.
    void add_sparse_constraint(const std::vector<std::pair<std::size_t, double>>& terms,
                               Relation relation, double rhs) {
        std::vector<double> row(variable_count(), 0.0);
        for (auto [j, v] : terms) row.at(j) += v;
        add_constraint(std::move(row), relation, rhs);
    }

    const std::vector<Constraint>& constraints() const noexcept { return constraints_; }

    /// Throws InputError when a row has the wrong length or a value is not finite.
    void validate() const {
        for (double c : objective_)
            if (!std::isfinite(c)) throw InputError("lp: non-finite objective coefficient");
        if (!std::isfinite(offset_)) throw InputError("lp: non-finite objective offset");
        for (std::size_t i = 0; i < constraints_.size(); ++i) {
            const auto& row = constraints_[i];
            if (row.coefficients.size() != objective_.size())
                throw InputError("lp: constraint " + std::to_string(i) + " has " +
                                 std::to_string(row.coefficients.size()) + " coefficients, expected " +
                                 std::to_string(objective_.size()));
            if (!std::isfinite(row.rhs))
                throw InputError("lp: constraint " + std::to_string(i) + " has a non-finite rhs");
            for (double v : row.coefficients)
                if (!std::isfinite(v))
                    throw InputError("lp: constraint " + std::to_string(i) + " has a non-finite coefficient");
        }
    }

private:
    Sense sense_;
    std::vector<double> objective_;
    double offset_{0.0};
    std::vector<Constraint> constraints_;
};

enum class Status { kOptimal, kInfeasible, kUnbounded };

inline const char* to_string(Status s) noexcept {
    switch (s) {
        case Status::kOptimal: return "optimal";
        case Status::kInfeasible: return "infeasible";
        case Status::kUnbounded: return "unbounded";
    }
    return "unknown";
}

struct LpSolution {
    Status status{Status::kInfeasible};
    double objective_value{0.0};
    std::vector<double> primal;  // empty unless optimal
    std::size_t iterations{0};

    bool optimal() const noexcept { return status == Status::kOptimal; }
};

/// Largest violation of any row of `lp` at `x` (0 when all rows hold).
inline double max_violation(const LinearProgram& lp, const std::vector<double>& x) {
    double worst = 0.0;
    for (const auto& row : lp.constraints()) {
        double lhs = 0.0;
        for (std::size_t j = 0; j < x.size(); ++j) lhs += row.coefficients[j] * x[j];
        double v = 0.0;
        switch (row.relation) {
            case Relation::kLessEqual: v = lhs - row.rhs; break;
            case Relation::kGreaterEqual: v = row.rhs - lhs; break;
            case Relation::kEqual: v = std::abs(lhs - row.rhs); break;
        }
        worst = std::max(worst, v);
    }
    for (double xj : x) worst = std::max(worst, -xj);
    return worst;
}

/// Substitutable solver backend.
class LpSolver {
public:
    virtual ~LpSolver() = default;
    virtual LpSolution solve(const LinearProgram& lp) const = 0;
};

}  // namespace casemix::lp
