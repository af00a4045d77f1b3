// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

// Dense two-phase primal simplex on a full tableau.
//
// Pricing is Dantzig (most negative reduced cost). After a run of degenerate
// pivots the solver switches to Bland's rule until the objective moves again,
// which rules out cycling. The final basic solution is recomputed from the
// original (scaled) rows with an LU factorization so that row residuals do not
// carry the round-off accumulated over the pivots.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

#include "casemix/common.hpp"
#include "casemix/lp/linear_program.hpp"

namespace casemix::lp {

struct SimplexOptions {
    double feasibility_tolerance{1e-7};
    double optimality_tolerance{1e-9};
    double pivot_tolerance{1e-9};
    double drop_tolerance{1e-13};
    std::size_t degenerate_before_bland{50};
    std::size_t max_iterations{0};  // 0: 50 * (rows + columns)
};

namespace detail {

/// Solves M x = rhs in place (M is n x n, row-major) by Gaussian elimination
/// with partial pivoting. Returns false when M is numerically singular.
inline bool lu_solve(std::vector<double>& M, std::vector<double>& rhs, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        double best = std::abs(M[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double v = std::abs(M[r * n + col]);
            if (v > best) {
                best = v;
                piv = r;
            }
        }
        if (best < 1e-14) return false;
        if (piv != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(M[piv * n + c], M[col * n + c]);
            std::swap(rhs[piv], rhs[col]);
        }
        const double d = M[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double f = M[r * n + col] / d;
            if (f == 0.0) continue;
            M[r * n + col] = 0.0;
            for (std::size_t c = col + 1; c < n; ++c) M[r * n + c] -= f * M[col * n + c];
            rhs[r] -= f * rhs[col];
        }
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = rhs[i];
        for (std::size_t c = i + 1; c < n; ++c) s -= M[i * n + c] * rhs[c];
        rhs[i] = s / M[i * n + i];
    }
    return true;
}

class Tableau {
public:
    Tableau(const LinearProgram& lp, const SimplexOptions& opt) : opt_(opt) { build(lp); }

    LpSolution run(const LinearProgram& lp) {
        LpSolution out;
        if (!phase_one()) {
            out.status = Status::kInfeasible;
            out.iterations = iterations_;
            return out;
        }
        drive_out_artificials();
        drop_artificial_columns();
        if (!phase_two()) {
            out.status = Status::kUnbounded;
            out.iterations = iterations_;
            return out;
        }
        out.status = Status::kOptimal;
        out.primal = extract_primal(lp);
        double z = lp.objective_offset();
        for (std::size_t j = 0; j < n_; ++j) z += lp.objective()[j] * out.primal[j];
        out.objective_value = z;
        out.iterations = iterations_;
        return out;
    }

private:
    // Column layout: [structural n_][slack/surplus][artificial].
    void build(const LinearProgram& lp) {
        n_ = lp.variable_count();
        m_ = lp.constraint_count();
        std::size_t slacks = 0, artificials = 0;
        for (const auto& row : lp.constraints()) {
            Relation rel = row.relation;
            if (row.rhs < 0.0) rel = flip(rel);
            if (rel != Relation::kEqual) ++slacks;
            if (rel != Relation::kLessEqual) ++artificials;
        }
        first_art_ = n_ + slacks;
        cols_ = first_art_ + artificials;
        width_ = cols_ + 1;
        t_.assign(m_ * width_, 0.0);
        basis_.assign(m_, 0);
        art_row_.clear();

        std::size_t next_slack = n_, next_art = first_art_;
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& row = lp.constraints()[i];
            double scale = 0.0;
            for (double v : row.coefficients) scale = std::max(scale, std::abs(v));
            scale = scale > 0.0 ? 1.0 / scale : 1.0;
            const double sign = row.rhs < 0.0 ? -1.0 : 1.0;
            Relation rel = sign < 0.0 ? flip(row.relation) : row.relation;
            double* r = &t_[i * width_];
            for (std::size_t j = 0; j < n_; ++j) r[j] = sign * scale * row.coefficients[j];
            r[cols_] = sign * scale * row.rhs;
            if (rel == Relation::kLessEqual) {
                r[next_slack] = 1.0;
                basis_[i] = next_slack++;
            } else {
                if (rel == Relation::kGreaterEqual) r[next_slack++] = -1.0;
                r[next_art] = 1.0;
                basis_[i] = next_art++;
                art_row_.push_back(i);
            }
        }
        // Keep the scaled standard-form rows for the final recomputation.
        a_std_.assign(m_ * first_art_, 0.0);
        b_std_.assign(m_, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            std::copy_n(&t_[i * width_], first_art_, &a_std_[i * first_art_]);
            b_std_[i] = t_[i * width_ + cols_];
        }
        active_row_.assign(m_, true);
        max_iter_ = opt_.max_iterations ? opt_.max_iterations : 50 * (m_ + cols_ + 10);
    }

    static Relation flip(Relation r) noexcept {
        if (r == Relation::kLessEqual) return Relation::kGreaterEqual;
        if (r == Relation::kGreaterEqual) return Relation::kLessEqual;
        return r;
    }

    double& at(std::size_t i, std::size_t j) noexcept { return t_[i * width_ + j]; }

    // Reduced-cost row for maximize c.x over the current basis:
    // obj[j] = c_B B^-1 a_j - c_j ; obj[rhs] = current objective value.
    void price(const std::vector<double>& c) {
        obj_.assign(width_, 0.0);
        for (std::size_t j = 0; j < cols_; ++j) obj_[j] = -c[j];
        for (std::size_t i = 0; i < m_; ++i) {
            if (!active_row_[i]) continue;
            const double cb = c[basis_[i]];
            if (cb == 0.0) continue;
            const double* r = &t_[i * width_];
            for (std::size_t j = 0; j <= cols_; ++j) obj_[j] += cb * r[j];
        }
    }

    void pivot(std::size_t r, std::size_t q) {
        double* pr = &t_[r * width_];
        const double p = pr[q];
        nz_.clear();
        for (std::size_t j = 0; j <= cols_; ++j) {
            if (pr[j] == 0.0) continue;
            pr[j] /= p;
            nz_.push_back(j);
        }
        pr[q] = 1.0;
        auto eliminate = [&](double* row) {
            const double f = row[q];
            if (f == 0.0) return;
            for (std::size_t j : nz_) {
                double v = row[j] - f * pr[j];
                if (std::abs(v) < opt_.drop_tolerance) v = 0.0;
                row[j] = v;
            }
            row[q] = 0.0;
        };
        for (std::size_t i = 0; i < m_; ++i)
            if (i != r && active_row_[i]) eliminate(&t_[i * width_]);
        eliminate(obj_.data());
        basis_[r] = q;
        ++iterations_;
    }

    // Returns false when the objective is unbounded along some column.
    bool iterate(std::size_t priced_cols) {
        std::size_t degenerate_run = 0;
        for (;;) {
            if (iterations_ > max_iter_) throw SolverError("lp: iteration limit exceeded");
            const bool bland = degenerate_run >= opt_.degenerate_before_bland;
            std::size_t q = priced_cols;
            double most = -opt_.optimality_tolerance;
            for (std::size_t j = 0; j < priced_cols; ++j) {
                if (obj_[j] < most) {
                    q = j;
                    if (bland) break;
                    most = obj_[j];
                }
            }
            if (q == priced_cols) return true;

            std::size_t r = m_;
            double best_ratio = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < m_; ++i) {
                if (!active_row_[i]) continue;
                const double a = at(i, q);
                if (a <= opt_.pivot_tolerance) continue;
                const double ratio = std::max(0.0, at(i, cols_)) / a;
                if (r == m_ || ratio < best_ratio - 1e-12 * (1.0 + best_ratio)) {
                    r = i;
                    best_ratio = ratio;
                } else if (ratio <= best_ratio + 1e-12 * (1.0 + best_ratio)) {
                    const bool take = bland ? basis_[i] < basis_[r] : a > at(r, q);
                    if (take) {
                        r = i;
                        best_ratio = std::min(best_ratio, ratio);
                    }
                }
            }
            if (r == m_) return false;
            degenerate_run = best_ratio <= 1e-12 ? degenerate_run + 1 : 0;
            pivot(r, q);
        }
    }

    bool phase_one() {
        if (art_row_.empty()) return true;
        std::vector<double> c(cols_, 0.0);
        for (std::size_t j = first_art_; j < cols_; ++j) c[j] = -1.0;
        price(c);
        iterate(cols_);
        double bnorm = 1.0;
        for (std::size_t i = 0; i < m_; ++i) bnorm = std::max(bnorm, std::abs(b_std_[i]));
        return -obj_[cols_] <= opt_.feasibility_tolerance * bnorm;
    }

    void drive_out_artificials() {
        for (std::size_t i = 0; i < m_; ++i) {
            if (basis_[i] < first_art_) continue;
            std::size_t q = first_art_;
            double best = opt_.pivot_tolerance;
            for (std::size_t j = 0; j < first_art_; ++j) {
                const double a = std::abs(at(i, j));
                if (a > best) {
                    best = a;
                    q = j;
                }
            }
            if (q < first_art_) {
                pivot(i, q);
            } else {
                active_row_[i] = false;  // redundant equality
            }
        }
    }

    void drop_artificial_columns() {
        if (first_art_ == cols_) return;
        const std::size_t new_width = first_art_ + 1;
        std::vector<double> t(m_ * new_width, 0.0);
        for (std::size_t i = 0; i < m_; ++i) {
            std::copy_n(&t_[i * width_], first_art_, &t[i * new_width]);
            t[i * new_width + first_art_] = t_[i * width_ + cols_];
        }
        t_.swap(t);
        cols_ = first_art_;
        width_ = new_width;
    }

    bool phase_two() {
        std::vector<double> c(cols_, 0.0);
        const bool minimize = sense_min_;
        for (std::size_t j = 0; j < n_; ++j) c[j] = minimize ? -cost_[j] : cost_[j];
        price(c);
        return iterate(cols_);
    }

    std::vector<double> extract_primal(const LinearProgram& lp) {
        std::vector<double> from_tableau(cols_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (active_row_[i]) from_tableau[basis_[i]] = std::max(0.0, at(i, cols_));

        std::vector<double> x(n_);
        std::copy_n(from_tableau.begin(), n_, x.begin());

        // Recompute x_B = B^-1 b on the original rows.
        std::vector<std::size_t> rows, bcols;
        for (std::size_t i = 0; i < m_; ++i)
            if (active_row_[i]) {
                rows.push_back(i);
                bcols.push_back(basis_[i]);
            }
        std::sort(bcols.begin(), bcols.end());
        const std::size_t k = rows.size();
        std::vector<double> M(k * k), rhs(k);
        for (std::size_t a = 0; a < k; ++a) {
            for (std::size_t b = 0; b < k; ++b) M[a * k + b] = a_std_[rows[a] * first_art_ + bcols[b]];
            rhs[a] = b_std_[rows[a]];
        }
        if (k > 0 && lu_solve(M, rhs, k)) {
            std::vector<double> polished(n_, 0.0);
            for (std::size_t b = 0; b < k; ++b)
                if (bcols[b] < n_) polished[bcols[b]] = std::max(0.0, rhs[b]);
            if (max_violation(lp, polished) <= max_violation(lp, x)) x.swap(polished);
        }
        return x;
    }

public:
    void set_cost(const LinearProgram& lp) {
        cost_ = lp.objective();
        sense_min_ = lp.sense() == Sense::kMinimize;
    }

private:
    SimplexOptions opt_;
    std::size_t n_{0}, m_{0}, cols_{0}, width_{0}, first_art_{0};
    std::vector<double> t_, obj_, a_std_, b_std_, cost_;
    std::vector<std::size_t> basis_, art_row_, nz_;
    std::vector<bool> active_row_;
    bool sense_min_{false};
    std::size_t iterations_{0}, max_iter_{0};
};

}  // namespace detail

/// Solves `lp` with a dense two-phase simplex. Pure: safe to call concurrently.
inline LpSolution solve(const LinearProgram& lp, const SimplexOptions& options = {}) {
    lp.validate();
    if (lp.variable_count() == 0) {
        LpSolution out;
        out.status = Status::kOptimal;
        for (const auto& row : lp.constraints()) {
            const bool ok = (row.relation == Relation::kLessEqual && row.rhs >= -options.feasibility_tolerance) ||
                            (row.relation == Relation::kGreaterEqual && row.rhs <= options.feasibility_tolerance) ||
                            (row.relation == Relation::kEqual && std::abs(row.rhs) <= options.feasibility_tolerance);
            if (!ok) out.status = Status::kInfeasible;
        }
        out.objective_value = out.optimal() ? lp.objective_offset() : 0.0;
        return out;
    }
    detail::Tableau tableau(lp, options);
    tableau.set_cost(lp);
    return tableau.run(lp);
}

class SimplexSolver final : public LpSolver {
public:
    explicit SimplexSolver(SimplexOptions options = {}) : options_(options) {}
    LpSolution solve(const LinearProgram& lp) const override { return lp::solve(lp, options_); }

private:
    SimplexOptions options_;
};

}  // namespace casemix::lp
