// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

// Capacity allocation model and the models derived from it.
//
// Variables: n_g per group, n_{g,p} per subtype and beta_{a,r} for every
// activity/eligible-resource pair. Ineligible pairs have no variable.
//
//   n_g       = sum_p n_{g,p}                      (group bookkeeping)
//   n_{g,p}   = sum_{r in R_a} beta_{a,r}          per activity a of (g,p)
//   sum_a beta_{a,r} t_a <= T_r                    per resource
//   n_{g,p}  >= mu_{g,p} n_g                       per subtype
//   all variables >= 0

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "casemix/cam/instance.hpp"
#include "casemix/common.hpp"
#include "casemix/lp/simplex.hpp"

namespace casemix::cam {

inline const lp::LpSolver& default_solver() {
    static const lp::SimplexSolver solver;
    return solver;
}

struct Allocation {
    std::size_t group;
    std::size_t subtype;
    std::size_t activity;
    std::size_t resource;
    std::size_t variable;
};

/// The constraint system plus the map from model symbols to LP columns.
struct CamModel {
    lp::LinearProgram lp;  // constraints only; callers set the objective
    std::vector<std::size_t> group_var;
    std::vector<std::vector<std::size_t>> subtype_var;
    std::vector<Allocation> allocations;
    std::vector<double> capacity;                    // T_r per resource
    std::vector<std::vector<std::vector<double>>> duration;  // t_a per [g][p][a]
    std::vector<std::vector<double>> mix;                    // mu per [g][p]

    std::size_t group_count() const noexcept { return group_var.size(); }
};

/// Detailed solution: outputs per group, per subtype, and the allocation.
struct CaseMix {
    std::vector<double> n;
    std::vector<std::vector<double>> n_subtype;
    std::vector<double> beta;  // aligned with CamModel::allocations

    double total() const noexcept {
        double s = 0.0;
        for (double v : n) s += v;
        return s;
    }
};

inline CamModel build_cam(const HospitalInstance& instance) {
    instance.validate();
    CamModel m;
    const std::size_t G = instance.groups.size();
    std::size_t next = 0;
    m.group_var.resize(G);
    m.subtype_var.resize(G);
    m.duration.resize(G);
    m.mix.resize(G);
    for (std::size_t g = 0; g < G; ++g) m.group_var[g] = next++;
    for (std::size_t g = 0; g < G; ++g) {
        const auto& grp = instance.groups[g];
        for (std::size_t p = 0; p < grp.subtypes.size(); ++p) {
            m.subtype_var[g].push_back(next++);
            m.mix[g].push_back(grp.subtypes[p].mix);
            m.duration[g].emplace_back();
        }
    }
    for (std::size_t g = 0; g < G; ++g) {
        const auto& grp = instance.groups[g];
        for (std::size_t p = 0; p < grp.subtypes.size(); ++p) {
            const auto& sub = grp.subtypes[p];
            for (std::size_t a = 0; a < sub.activities.size(); ++a) {
                const auto& act = sub.activities[a];
                m.duration[g][p].push_back(act.duration_hours);
                if (act.eligible_resources.empty())
                    throw InputError("activity '" + act.id + "' of " + grp.id + "/" + sub.id +
                                     " has no eligible resources");
                for (const auto& rid : act.eligible_resources) {
                    const std::size_t r = instance.find_resource(rid);
                    if (r == instance.resources.size())
                        throw InputError("activity '" + act.id + "' of " + grp.id + "/" + sub.id +
                                         " references unknown resource '" + rid + "'");
                    m.allocations.push_back({g, p, a, r, next++});
                }
            }
        }
    }

    m.lp = lp::LinearProgram(next, lp::Sense::kMaximize);
    for (const auto& r : instance.resources) m.capacity.push_back(r.capacity(instance.horizon_weeks));

    using Terms = std::vector<std::pair<std::size_t, double>>;
    for (std::size_t g = 0; g < G; ++g) {
        Terms t{{m.group_var[g], 1.0}};
        for (std::size_t v : m.subtype_var[g]) t.emplace_back(v, -1.0);
        m.lp.add_sparse_constraint(t, lp::Relation::kEqual, 0.0);
    }
    // One row per activity: n_{g,p} = sum of its allocations. Allocations of
    // one activity are contiguous.
    for (std::size_t i = 0; i < m.allocations.size();) {
        const auto& first = m.allocations[i];
        Terms t{{m.subtype_var[first.group][first.subtype], 1.0}};
        std::size_t j = i;
        while (j < m.allocations.size() && m.allocations[j].group == first.group &&
               m.allocations[j].subtype == first.subtype && m.allocations[j].activity == first.activity) {
            t.emplace_back(m.allocations[j].variable, -1.0);
            ++j;
        }
        m.lp.add_sparse_constraint(t, lp::Relation::kEqual, 0.0);
        i = j;
    }
    for (std::size_t r = 0; r < instance.resources.size(); ++r) {
        Terms t;
        for (const auto& al : m.allocations)
            if (al.resource == r && m.duration[al.group][al.subtype][al.activity] != 0.0)
                t.emplace_back(al.variable, m.duration[al.group][al.subtype][al.activity]);
        if (!t.empty()) m.lp.add_sparse_constraint(t, lp::Relation::kLessEqual, m.capacity[r]);
    }
    for (std::size_t g = 0; g < G; ++g) {
        for (std::size_t p = 0; p < m.subtype_var[g].size(); ++p) {
            if (m.mix[g][p] <= 0.0) continue;
            m.lp.add_sparse_constraint({{m.subtype_var[g][p], 1.0}, {m.group_var[g], -m.mix[g][p]}},
                                       lp::Relation::kGreaterEqual, 0.0);
        }
    }
    return m;
}

inline CaseMix extract_case_mix(const CamModel& m, const std::vector<double>& x) {
    CaseMix cm;
    cm.n.resize(m.group_count());
    cm.n_subtype.resize(m.group_count());
    for (std::size_t g = 0; g < m.group_count(); ++g) {
        cm.n[g] = x.at(m.group_var[g]);
        for (std::size_t v : m.subtype_var[g]) cm.n_subtype[g].push_back(x.at(v));
    }
    for (const auto& al : m.allocations) cm.beta.push_back(x.at(al.variable));
    return cm;
}

/// Worst violation of each constraint family for a detailed solution.
struct Residuals {
    double group_bookkeeping{0.0};
    double activity_bookkeeping{0.0};
    double capacity{0.0};
    double mix{0.0};
    double negativity{0.0};

    double worst() const noexcept {
        return std::max({group_bookkeeping, activity_bookkeeping, capacity, mix, negativity});
    }
};

inline Residuals residuals(const CamModel& m, const CaseMix& cm) {
    Residuals res;
    const std::size_t G = m.group_count();
    for (std::size_t g = 0; g < G; ++g) {
        double s = 0.0;
        for (double v : cm.n_subtype[g]) s += v;
        res.group_bookkeeping = std::max(res.group_bookkeeping, std::abs(cm.n[g] - s));
        res.negativity = std::max(res.negativity, -cm.n[g]);
        for (std::size_t p = 0; p < cm.n_subtype[g].size(); ++p) {
            res.mix = std::max(res.mix, m.mix[g][p] * cm.n[g] - cm.n_subtype[g][p]);
            res.negativity = std::max(res.negativity, -cm.n_subtype[g][p]);
            for (std::size_t a = 0; a < m.duration[g][p].size(); ++a) {
                double alloc = 0.0;
                for (std::size_t i = 0; i < m.allocations.size(); ++i) {
                    const auto& al = m.allocations[i];
                    if (al.group == g && al.subtype == p && al.activity == a) alloc += cm.beta[i];
                }
                res.activity_bookkeeping = std::max(res.activity_bookkeeping, std::abs(cm.n_subtype[g][p] - alloc));
            }
        }
    }
    std::vector<double> used(m.capacity.size(), 0.0);
    for (std::size_t i = 0; i < m.allocations.size(); ++i) {
        const auto& al = m.allocations[i];
        used[al.resource] += cm.beta[i] * m.duration[al.group][al.subtype][al.activity];
        res.negativity = std::max(res.negativity, -cm.beta[i]);
    }
    for (std::size_t r = 0; r < used.size(); ++r) res.capacity = std::max(res.capacity, used[r] - m.capacity[r]);
    return res;
}

struct BoundsReport {
    std::vector<double> upper;
    std::vector<double> lower;
    std::vector<std::string> warnings;
};

namespace detail {

inline void require_size(std::span<const double> v, std::size_t n, const char* what) {
    if (v.size() != n)
        throw InputError(std::string(what) + " has " + std::to_string(v.size()) + " entries, expected " +
                         std::to_string(n));
}

// Slightly relaxed copy of a target output so that targets taken from LP
// optima do not become infeasible through round-off.
inline double relaxed(double v) noexcept { return std::max(0.0, v - 1e-9 * std::max(1.0, std::abs(v))); }

}  // namespace detail

/// Largest output of each group when every other group is switched off.
inline BoundsReport compute_upper_bounds(const CamModel& m, const std::vector<std::string>& labels = {},
                                         const lp::LpSolver& solver = default_solver()) {
    BoundsReport rep;
    const std::size_t G = m.group_count();
    rep.upper.assign(G, 0.0);
    for (std::size_t g = 0; g < G; ++g) {
        lp::LinearProgram lp = m.lp;
        lp.set_objective_coefficient(m.group_var[g], 1.0);
        for (std::size_t h = 0; h < G; ++h)
            if (h != g) lp.add_sparse_constraint({{m.group_var[h], 1.0}}, lp::Relation::kEqual, 0.0);
        const auto sol = solver.solve(lp);
        const std::string name = g < labels.size() ? labels[g] : "group " + std::to_string(g);
        if (sol.status == lp::Status::kUnbounded)
            throw ConfigError("upper bound of " + name +
                              " is unbounded: some activity consumes no capacity");
        if (sol.status == lp::Status::kInfeasible) {
            rep.warnings.push_back("upper bound model of " + name + " is infeasible; using 0");
            continue;
        }
        rep.upper[g] = std::max(0.0, sol.objective_value);
    }
    return rep;
}

/// Lexicographic lower bounds: for each g the least output it keeps while any
/// single other group runs at its upper bound.
inline std::vector<double> compute_lower_bounds(const CamModel& m, std::span<const double> upper,
                                                const lp::LpSolver& solver = default_solver()) {
    const std::size_t G = m.group_count();
    detail::require_size(upper, G, "upper bounds");
    std::vector<double> lower(G, 0.0);
    for (std::size_t g = 0; g < G; ++g) {
        double best = upper[g];
        for (std::size_t h = 0; h < G; ++h) {
            if (h == g) continue;
            lp::LinearProgram lp = m.lp;
            lp.set_objective_coefficient(m.group_var[g], 1.0);
            lp.add_sparse_constraint({{m.group_var[h], 1.0}}, lp::Relation::kGreaterEqual, detail::relaxed(upper[h]));
            const auto sol = solver.solve(lp);
            if (sol.status == lp::Status::kUnbounded)
                throw ConfigError("lexicographic bound model is unbounded");
            const double v = sol.optimal() ? sol.objective_value : 0.0;
            best = std::min(best, v);
        }
        lower[g] = std::clamp(best, 0.0, upper[g]);
    }
    return lower;
}

inline BoundsReport compute_bounds(const CamModel& m, const std::vector<std::string>& labels = {},
                                   const lp::LpSolver& solver = default_solver()) {
    BoundsReport rep = compute_upper_bounds(m, labels, solver);
    rep.lower = compute_lower_bounds(m, rep.upper, solver);
    return rep;
}

inline constexpr double kDefaultLambda = 0.001;

/// Augmented epsilon-constraint model: maximize n_{g*} plus a small reward
/// for surplus above epsilon in every other group, each normalized by its
/// upper bound.
inline lp::LinearProgram build_ecm_model(const CamModel& m, std::span<const double> eps, std::size_t objective_group,
                                         std::span<const double> upper, double lambda = kDefaultLambda) {
    const std::size_t G = m.group_count();
    if (objective_group >= G)
        throw InputError("objective group " + std::to_string(objective_group) + " is not in the instance");
    detail::require_size(eps, G, "epsilon");
    detail::require_size(upper, G, "upper bounds");
    lp::LinearProgram lp = m.lp;
    lp.set_objective_coefficient(m.group_var[objective_group], 1.0);
    double offset = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
        if (g == objective_group) continue;
        if (eps[g] < 0.0 || !std::isfinite(eps[g])) throw InputError("epsilon must be finite and non-negative");
        lp.add_sparse_constraint({{m.group_var[g], 1.0}}, lp::Relation::kGreaterEqual, eps[g]);
        if (upper[g] > 0.0) {
            lp.set_objective_coefficient(m.group_var[g], lambda / upper[g]);
            offset -= lambda * eps[g] / upper[g];
        }
    }
    lp.set_objective_offset(offset);
    return lp;
}

/// Grid-point correction: the feasible point below epsilon with the smallest
/// total shortfall sum_g (eps_g - n_g). Always feasible (n = 0).
inline lp::LinearProgram build_feasible_gridpoint_model(const CamModel& m, std::span<const double> eps) {
    const std::size_t G = m.group_count();
    detail::require_size(eps, G, "epsilon");
    lp::LinearProgram lp = m.lp;
    lp.set_sense(lp::Sense::kMinimize);
    double offset = 0.0;
    for (std::size_t g = 0; g < G; ++g) {
        if (eps[g] < 0.0 || !std::isfinite(eps[g])) throw InputError("epsilon must be finite and non-negative");
        lp.add_sparse_constraint({{m.group_var[g], 1.0}}, lp::Relation::kLessEqual, eps[g]);
        lp.set_objective_coefficient(m.group_var[g], -1.0);
        offset += eps[g];
    }
    lp.set_objective_offset(offset);
    return lp;
}

struct EvaluationOptions {
    std::size_t objective_group{0};
    double lambda{kDefaultLambda};
    bool correction_upfront{true};
};

struct GridpointResult {
    CaseMix mix;
    bool raw_feasible{false};  // the drawn epsilon was feasible as given
    std::size_t lp_solves{0};
};

/// Turns a grid point into an efficient case mix: solve the ECM model, and if
/// the grid point is infeasible, pull it down to the nearest feasible point
/// first and solve again from there.
inline GridpointResult evaluate_gridpoint(const CamModel& m, std::span<const double> eps, std::span<const double> upper,
                                          const EvaluationOptions& opt = {},
                                          const lp::LpSolver& solver = default_solver()) {
    GridpointResult out;
    if (!opt.correction_upfront) {
        const auto sol = solver.solve(build_ecm_model(m, eps, opt.objective_group, upper, opt.lambda));
        ++out.lp_solves;
        if (sol.optimal()) {
            out.raw_feasible = true;
            out.mix = extract_case_mix(m, sol.primal);
            return out;
        }
        if (sol.status == lp::Status::kUnbounded) throw SolverError("ECM model is unbounded");
    }
    // In upfront mode the objective group's epsilon is pinned too, so it
    // contributes n_{g*} <= eps_{g*} to the correction model.
    const auto corr = solver.solve(build_feasible_gridpoint_model(m, eps));
    ++out.lp_solves;
    if (!corr.optimal()) throw SolverError(std::string("grid-point correction model is ") + lp::to_string(corr.status));
    if (opt.correction_upfront) {
        double scale = 1.0;
        for (double e : eps) scale += std::abs(e);
        out.raw_feasible = corr.objective_value <= 1e-9 * scale;
    }
    std::vector<double> corrected(m.group_count(), 0.0);
    for (std::size_t g = 0; g < m.group_count(); ++g) corrected[g] = detail::relaxed(corr.primal[m.group_var[g]]);
    const auto sol = solver.solve(build_ecm_model(m, corrected, opt.objective_group, upper, opt.lambda));
    ++out.lp_solves;
    if (!sol.optimal()) throw SolverError(std::string("ECM model after correction is ") + lp::to_string(sol.status));
    out.mix = extract_case_mix(m, sol.primal);
    return out;
}

/// Whether an output vector can be produced at all; the shortfall of the
/// correction model at eps = n (0 when feasible) together with the allocation.
inline std::pair<double, CaseMix> feasibility_shortfall(const CamModel& m, std::span<const double> n,
                                                        const lp::LpSolver& solver = default_solver()) {
    const auto corr = solver.solve(build_feasible_gridpoint_model(m, n));
    if (!corr.optimal()) throw SolverError("correction model failed");
    return {corr.objective_value, extract_case_mix(m, corr.primal)};
}

}  // namespace casemix::cam
