// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#include <gtest/gtest.h>

#include <random>
#include <string>
#include <vector>

#include "casemix/cam/model.hpp"

namespace {

using namespace casemix::cam;

Resource room(std::string id, double hours) { return {std::move(id), ResourceKind::kOther, 1, hours}; }

Group single(std::string id, double duration, std::vector<std::string> eligible) {
    return {id, {{"all", 1.0, {{"treat", duration, std::move(eligible)}}}}};
}

// One group, one activity of 2 h on a 100 h resource.
HospitalInstance one_group() {
    HospitalInstance h;
    h.resources = {room("R", 100.0)};
    h.groups = {single("G1", 2.0, {"R"})};
    return h;
}

// Two groups of 1 h activities on a shared 50 h resource: n1 + n2 <= 50.
HospitalInstance shared_pair() {
    HospitalInstance h;
    h.resources = {room("R", 50.0)};
    h.groups = {single("G1", 1.0, {"R"}), single("G2", 1.0, {"R"})};
    return h;
}

TEST(Cam, OneGroupUpperBound) {
    const auto m = build_cam(one_group());
    const auto rep = compute_bounds(m);
    ASSERT_EQ(rep.upper.size(), 1u);
    EXPECT_NEAR(rep.upper[0], 50.0, 1e-6);
    // With nothing to compete against the lower bound is the upper bound.
    EXPECT_NEAR(rep.lower[0], 50.0, 1e-6);
    EXPECT_TRUE(rep.warnings.empty());
}

TEST(Cam, VariableLayout) {
    const auto m = build_cam(shared_pair());
    EXPECT_EQ(m.group_count(), 2u);
    EXPECT_EQ(m.allocations.size(), 2u);
    EXPECT_EQ(m.lp.variable_count(), 6u);  // 2 groups + 2 subtypes + 2 allocations
    EXPECT_NEAR(m.capacity[0], 50.0, 0.0);
}

TEST(Cam, HorizonAndBedsScaleCapacity) {
    auto h = one_group();
    h.horizon_weeks = 52.0;
    h.resources[0].bed_count = 3;
    const auto rep = compute_upper_bounds(build_cam(h));
    EXPECT_NEAR(rep.upper[0], 50.0 * 52.0 * 3.0, 1e-6);
}

TEST(Cam, SharedResourceBounds) {
    const auto m = build_cam(shared_pair());
    const auto rep = compute_bounds(m);
    EXPECT_NEAR(rep.upper[0], 50.0, 1e-6);
    EXPECT_NEAR(rep.upper[1], 50.0, 1e-6);
    EXPECT_NEAR(rep.lower[0], 0.0, 1e-6);
    EXPECT_NEAR(rep.lower[1], 0.0, 1e-6);
}

TEST(Cam, DedicatedResourceLowerEqualsUpper) {
    HospitalInstance h;
    h.resources = {room("A", 60.0), room("B", 90.0)};
    h.groups = {single("G1", 2.0, {"A"}), single("G2", 3.0, {"B"})};
    const auto rep = compute_bounds(build_cam(h));
    EXPECT_NEAR(rep.upper[0], 30.0, 1e-6);
    EXPECT_NEAR(rep.upper[1], 30.0, 1e-6);
    EXPECT_NEAR(rep.lower[0], rep.upper[0], 1e-6);
    EXPECT_NEAR(rep.lower[1], rep.upper[1], 1e-6);
}

TEST(Cam, PartiallySharedLowerBound) {
    // G1 uses only A (40 h); G2 may use A or B (20 h each), 1 h per patient.
    // With G1 at 40, G2 keeps B: lower bound 20.
    HospitalInstance h;
    h.resources = {room("A", 40.0), room("B", 20.0)};
    h.groups = {single("G1", 1.0, {"A"}), single("G2", 1.0, {"A", "B"})};
    const auto rep = compute_bounds(build_cam(h));
    EXPECT_NEAR(rep.upper[0], 40.0, 1e-6);
    EXPECT_NEAR(rep.upper[1], 60.0, 1e-6);
    EXPECT_NEAR(rep.lower[0], 0.0, 1e-6);
    EXPECT_NEAR(rep.lower[1], 20.0, 1e-6);
}

TEST(Cam, ZeroDurationIsConfigError) {
    HospitalInstance h;
    h.resources = {room("R", 10.0)};
    h.groups = {single("G1", 0.0, {"R"})};
    EXPECT_THROW(compute_upper_bounds(build_cam(h)), casemix::ConfigError);
}

TEST(Cam, UnknownResourceIsInputError) {
    HospitalInstance h;
    h.resources = {room("R", 10.0)};
    h.groups = {single("G1", 1.0, {"X"})};
    EXPECT_THROW(build_cam(h), casemix::InputError);
}

TEST(Cam, EmptyEligibilityIsInputError) {
    HospitalInstance h;
    h.resources = {room("R", 10.0)};
    h.groups = {single("G1", 1.0, {})};
    EXPECT_THROW(build_cam(h), casemix::InputError);
}

TEST(Cam, MixMustSumToOne) {
    HospitalInstance h;
    h.resources = {room("R", 10.0)};
    h.groups = {{"G", {{"a", 0.6, {{"x", 1.0, {"R"}}}}, {"b", 0.6, {{"y", 1.0, {"R"}}}}}}};
    EXPECT_THROW(build_cam(h), casemix::InputError);
    EXPECT_EQ(normalize_mixes(h), std::vector<std::string>{"G"});
    EXPECT_NO_THROW(build_cam(h));
    EXPECT_DOUBLE_EQ(h.groups[0].subtypes[0].mix, 0.5);
}

TEST(Cam, MixConstraintBindsSubtypes) {
    // Subtype a (70%) takes 1 h on A (35 h), subtype b (30%) takes 1 h on B (90 h).
    // a limits: 0.7 n <= 35 -> n <= 50.
    HospitalInstance h;
    h.resources = {room("A", 35.0), room("B", 90.0)};
    h.groups = {{"G", {{"a", 0.7, {{"x", 1.0, {"A"}}}}, {"b", 0.3, {{"y", 1.0, {"B"}}}}}}};
    const auto m = build_cam(h);
    const auto rep = compute_upper_bounds(m);
    EXPECT_NEAR(rep.upper[0], 50.0, 1e-6);
}

TEST(Cam, EcmOnSharedPair) {
    const auto m = build_cam(shared_pair());
    const std::vector<double> upper{50.0, 50.0};
    const std::vector<double> eps{0.0, 20.0};
    const auto sol = default_solver().solve(build_ecm_model(m, eps, 0, upper));
    ASSERT_TRUE(sol.optimal());
    const auto cm = extract_case_mix(m, sol.primal);
    EXPECT_NEAR(cm.n[0], 30.0, 1e-6);
    EXPECT_NEAR(cm.n[1], 20.0, 1e-6);
    // Objective n1 + 0.001 (n2 - 20)/50 at the optimum.
    EXPECT_NEAR(sol.objective_value, 30.0, 1e-9);
}

TEST(Cam, EcmZeroEpsilonReducesToSingleObjective) {
    const auto m = build_cam(shared_pair());
    const std::vector<double> upper{50.0, 50.0}, eps{0.0, 0.0};
    const auto sol = default_solver().solve(build_ecm_model(m, eps, 1, upper));
    ASSERT_TRUE(sol.optimal());
    EXPECT_NEAR(sol.primal[m.group_var[1]], 50.0, 1e-6);
}

TEST(Cam, EcmAtFullSharedOutputIsInfeasibleForOthers) {
    const auto m = build_cam(shared_pair());
    const std::vector<double> upper{50.0, 50.0}, eps{0.0, 50.0};
    const auto sol = default_solver().solve(build_ecm_model(m, eps, 0, upper));
    ASSERT_TRUE(sol.optimal());
    EXPECT_NEAR(sol.primal[m.group_var[0]], 0.0, 1e-6);
    const std::vector<double> over{0.0, 50.5};
    EXPECT_EQ(default_solver().solve(build_ecm_model(m, over, 0, upper)).status, casemix::lp::Status::kInfeasible);
}

TEST(Cam, EcmRejectsUnknownObjectiveGroup) {
    const auto m = build_cam(shared_pair());
    const std::vector<double> v{0.0, 0.0};
    EXPECT_THROW(build_ecm_model(m, v, 2, v), casemix::InputError);
    const std::vector<double> short_eps{0.0};
    EXPECT_THROW(build_ecm_model(m, short_eps, 0, v), casemix::InputError);
}

TEST(Cam, CorrectionModel) {
    const auto m = build_cam(shared_pair());
    const std::vector<double> eps{40.0, 40.0};
    const auto sol = default_solver().solve(build_feasible_gridpoint_model(m, eps));
    ASSERT_TRUE(sol.optimal());
    EXPECT_NEAR(sol.objective_value, 30.0, 1e-6);
    const double n1 = sol.primal[m.group_var[0]], n2 = sol.primal[m.group_var[1]];
    EXPECT_NEAR(n1 + n2, 50.0, 1e-6);
    EXPECT_LE(n1, 40.0 + 1e-7);
    EXPECT_LE(n2, 40.0 + 1e-7);

    const std::vector<double> zero{0.0, 0.0};
    const auto z = default_solver().solve(build_feasible_gridpoint_model(m, zero));
    ASSERT_TRUE(z.optimal());
    EXPECT_NEAR(z.objective_value, 0.0, 1e-12);

    const std::vector<double> inside{10.0, 15.0};
    const auto in = default_solver().solve(build_feasible_gridpoint_model(m, inside));
    EXPECT_NEAR(in.objective_value, 0.0, 1e-9);
}

TEST(Cam, EvaluateGridpointBothOrders) {
    const auto m = build_cam(shared_pair());
    const std::vector<double> upper{50.0, 50.0};
    for (bool upfront : {true, false}) {
        EvaluationOptions opt;
        opt.correction_upfront = upfront;
        const std::vector<double> feasible{0.0, 20.0};
        auto r = evaluate_gridpoint(m, feasible, upper, opt);
        EXPECT_TRUE(r.raw_feasible);
        EXPECT_NEAR(r.mix.n[0], 30.0, 1e-6);
        EXPECT_NEAR(r.mix.n[1], 20.0, 1e-6);

        const std::vector<double> infeasible{0.0, 70.0};
        r = evaluate_gridpoint(m, infeasible, upper, opt);
        EXPECT_FALSE(r.raw_feasible);
        EXPECT_NEAR(r.mix.n[0] + r.mix.n[1], 50.0, 1e-6);
    }
}

// Random three-group instances with partially shared resources: every
// evaluated point is feasible, satisfies the bookkeeping identities, and no
// returned point dominates another.
TEST(Cam, EvaluatedPointsAreFeasibleAndMutuallyNonDominated) {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> hours(20.0, 200.0), dur(0.5, 4.0);
    for (int inst = 0; inst < 5; ++inst) {
        HospitalInstance h;
        h.resources = {room("A", hours(rng)), room("B", hours(rng)), room("C", hours(rng))};
        h.groups = {
            {"G1", {{"s", 0.6, {{"x", dur(rng), {"A"}}, {"y", dur(rng), {"B", "C"}}}}, {"m", 0.4, {{"z", dur(rng), {"C"}}}}}},
            {"G2", {{"s", 1.0, {{"x", dur(rng), {"A", "B"}}}}}},
            {"G3", {{"s", 0.5, {{"x", dur(rng), {"C"}}}}, {"m", 0.5, {{"y", dur(rng), {"B"}}}}}},
        };
        const auto m = build_cam(h);
        const auto rep = compute_bounds(m);
        for (std::size_t g = 0; g < 3; ++g) {
            EXPECT_GE(rep.lower[g], 0.0);
            EXPECT_LE(rep.lower[g], rep.upper[g]);
        }
        std::vector<std::vector<double>> found;
        for (int draw = 0; draw < 40; ++draw) {
            std::vector<double> eps(3, 0.0);
            for (std::size_t g = 1; g < 3; ++g) eps[g] = std::uniform_real_distribution<double>(0.0, rep.upper[g])(rng);
            const auto r = evaluate_gridpoint(m, eps, rep.upper);
            const auto res = residuals(m, r.mix);
            EXPECT_LE(res.worst(), 1e-6);
            double total = 0.0;
            for (double v : r.mix.n) total += v;
            EXPECT_LE(total, rep.upper[0] + rep.upper[1] + rep.upper[2] + 1e-6);
            if (r.raw_feasible)
                for (std::size_t g = 1; g < 3; ++g) EXPECT_GE(r.mix.n[g], eps[g] - 1e-6);
            found.push_back(r.mix.n);
        }
        // Dominance with a small tolerance: a point only counts as dominating
        // if it is better by more than LP round-off somewhere.
        for (const auto& a : found)
            for (const auto& b : found) {
                bool ge = true, gt = false;
                for (std::size_t k = 0; k < 3; ++k) {
                    if (a[k] < b[k] - 1e-7) ge = false;
                    if (a[k] > b[k] + 1e-5) gt = true;
                }
                EXPECT_FALSE(ge && gt);
            }
    }
}

TEST(Cam, ZeroHourResourceGivesZeroBound) {
    // G2's mix forces a subtype onto a zero-hour resource, so only n2 = 0 is
    // feasible.
    HospitalInstance h;
    h.resources = {room("A", 10.0), room("Z", 0.0)};
    h.groups = {single("G1", 1.0, {"A"}), {"G2", {{"p", 0.5, {{"x", 1.0, {"A"}}}}, {"q", 0.5, {{"y", 1.0, {"Z"}}}}}}};
    const auto rep = compute_bounds(build_cam(h));
    EXPECT_NEAR(rep.upper[1], 0.0, 1e-9);
    EXPECT_NEAR(rep.lower[1], 0.0, 1e-9);
}

}  // namespace
