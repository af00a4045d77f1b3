// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "../support/archive_oracle.hpp"
#include "casemix/archive/archive.hpp"
#include "casemix/io/archive_file.hpp"

namespace {

using casemix::Archive;
using casemix::Hypercube;
using casemix::InsertOutcome;
using casemix::ListArchive;
using casemix::Point;

Archive example30() { return casemix::io::load_archive(CASEMIX_DATA_DIR "/example30.archive").archive; }

TEST(Archive, EmptyMake) {
    const auto a = Archive::make({});
    EXPECT_EQ(a.size(), 0u);
    EXPECT_EQ(a.height(), 0u);
    EXPECT_FALSE(a.bounds().has_value());
}

TEST(Archive, Example30Basics) {
    const auto a = example30();
    EXPECT_EQ(a.dimension(), 3u);
    EXPECT_EQ(a.size(), 30u);
    EXPECT_EQ(a.height(), 5u);
    const auto pf = a.bounds();
    ASSERT_TRUE(pf);
    EXPECT_EQ(*pf, Hypercube({{9, 100}, {5, 95}, {1, 96}}));
    EXPECT_EQ(a.find_min(0), 9.0);
    EXPECT_EQ(a.find_max(0), 100.0);
    EXPECT_EQ(a.find_min(2), 1.0);
    EXPECT_EQ(a.find_max(2), 96.0);
}

TEST(Archive, Example30RangeQuery) {
    const auto a = example30();
    const auto got = a.range_query(Hypercube({{45, 100}, {20, 95}, {56, 96}}));
    // List order of the fixture.
    const std::vector<Point> want{{100, 89, 82}, {68, 26, 96}, {68, 93, 76}, {80, 79, 78}};
    EXPECT_EQ(got, want);
    EXPECT_EQ(a.range_query(Hypercube::everything(3)).size(), 30u);
}

TEST(Archive, Example30Dominance) {
    const auto a = example30();
    EXPECT_TRUE(a.is_dominated(Point{25, 5, 87}));  // e.g. by [68,26,96]
    EXPECT_FALSE(a.is_dominated(Point{100, 89, 82}));
    EXPECT_FALSE(a.is_dominated(Point{68, 26, 96}));
    // Frontier members of the fixture by brute force.
    const auto nd = casemix::find_non_dominated(a.points());
    EXPECT_EQ(nd, ListArchive::find_non_dominated(a.points()));
    for (const auto& p : nd) EXPECT_FALSE(a.is_dominated(p));
}

TEST(Archive, Example30Neighbours) {
    const auto a = example30();
    const Point q{25, 5, 87};
    EXPECT_TRUE(a.neighbours(q, 0.0).empty());
    EXPECT_TRUE(a.neighbours(q, 15.0).empty());
    const auto r50 = a.neighbours(q, 50.0);
    EXPECT_NE(std::find(r50.begin(), r50.end(), Point{27, 5, 41}), r50.end());
    // Closed ball: distance exactly sqrt(2120).
    const auto edge = a.neighbours(q, std::sqrt(2120.0));
    EXPECT_NE(std::find(edge.begin(), edge.end(), Point{27, 5, 41}), edge.end());
    EXPECT_EQ(a.neighbours(q, 50.0), ListArchive(a.points()).neighbours(q, 50.0));
}

TEST(Archive, NearestExcludesTarget) {
    const auto a = example30();
    for (const auto& p : a.points()) {
        const auto n = a.nearest(p);
        ASSERT_TRUE(n);
        EXPECT_NE(*n, p);
        EXPECT_EQ(*n, *ListArchive(a.points()).nearest(p));
    }
    Archive single(2);
    single.insert({1, 1});
    EXPECT_EQ(single.nearest(Point{5, 5}), (Point{1, 1}));
    EXPECT_FALSE(single.nearest(Point{1, 1}).has_value());
    EXPECT_FALSE(Archive(2).nearest(Point{0, 0}).has_value());
}

TEST(Archive, NearestTieGoesToEarliest) {
    Archive a(2);
    a.insert({2, 0});
    a.insert({0, 2});
    a.insert({-2, 0});
    EXPECT_EQ(a.nearest(Point{0, 0}), (Point{2, 0}));
    a.erase(Point{2, 0});
    EXPECT_EQ(a.nearest(Point{0, 0}), (Point{0, 2}));
}

TEST(Archive, SevenPoints) {
    std::vector<Point> pts{{3, 1}, {1, 4}, {5, 9}, {2, 6}, {5, 3}, {5, 8}, {9, 7}};
    const auto a = Archive::make(pts);
    EXPECT_EQ(a.height(), 3u);
    for (const auto& p : pts) EXPECT_TRUE(a.is_in(p));
    EXPECT_FALSE(a.is_in(Point{3, 1.001}));
}

TEST(Archive, InsertDeleteRoundTrip) {
    Archive a(2);
    EXPECT_EQ(a.insert({1, 2}), InsertOutcome::kInserted);
    EXPECT_TRUE(a.is_in(Point{1, 2}));
    EXPECT_EQ(a.insert({1, 2}), InsertOutcome::kDuplicate);
    EXPECT_EQ(a.size(), 1u);
    EXPECT_TRUE(a.erase(Point{1, 2}));
    EXPECT_FALSE(a.is_in(Point{1, 2}));
    EXPECT_FALSE(a.erase(Point{1, 2}));
}

TEST(Archive, MembershipTolerance) {
    Archive a(2);
    a.insert({1.0, 2.0});
    EXPECT_TRUE(a.is_in(Point{1.0 + 5e-13, 2.0}));
    EXPECT_FALSE(a.is_in(Point{1.0 + 1e-3, 2.0}));
}

TEST(Archive, ThousandInsertsThousandProbes) {
    std::mt19937_64 rng(77);
    Archive a(4);
    ListArchive oracle(4);
    std::uniform_int_distribution<int> c(0, 9);
    for (int i = 0; i < 1000; ++i) {
        Point p{double(c(rng)), double(c(rng)), double(c(rng)), double(c(rng))};
        EXPECT_EQ(a.insert(p) == InsertOutcome::kInserted, oracle.insert(p));
    }
    for (int i = 0; i < 1000; ++i) {
        Point p{double(c(rng)), double(c(rng)), double(c(rng)), double(c(rng))};
        EXPECT_EQ(a.is_in(p), oracle.is_in(p));
    }
}

TEST(Archive, IdealAndNadirTrackEdits) {
    Archive a(2);
    a.insert({1, 5});
    a.insert({4, 2});
    EXPECT_EQ(a.ideal(), (Point{4, 5}));
    EXPECT_EQ(a.nadir(), (Point{1, 2}));
    a.erase(Point{4, 2});
    EXPECT_EQ(a.ideal(), (Point{1, 5}));
    EXPECT_EQ(a.nadir(), (Point{1, 5}));
}

TEST(Archive, DimensionMismatchIsInputError) {
    Archive a(3);
    EXPECT_THROW(a.insert({1, 2}), casemix::InputError);
    a.insert({1, 2, 3});
    EXPECT_THROW(a.is_in(Point{1, 2}), casemix::InputError);
    EXPECT_THROW(a.range_query(Hypercube({{0, 1}})), casemix::InputError);
    EXPECT_THROW(Archive::make({{1, 2}, {1, 2, 3}}), casemix::InputError);
    EXPECT_THROW(a.neighbours(Point{1, 2, 3}, -1.0), casemix::InputError);
}

TEST(Archive, FindNonDominatedSmallCases) {
    EXPECT_EQ(casemix::find_non_dominated(std::vector<Point>{{1, 1}, {2, 2}}), (std::vector<Point>{{2, 2}}));
    const std::vector<Point> front{{1, 3}, {2, 2}, {3, 1}};
    EXPECT_EQ(casemix::find_non_dominated(front), front);
    // Equal points do not dominate each other.
    EXPECT_EQ(casemix::find_non_dominated(std::vector<Point>{{1, 1}, {1, 1}}).size(), 2u);
}

TEST(Archive, FindNonDominatedRandomAgainstPairwise) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 60; ++t) {
        const std::size_t dims = 2 + t % 5;
        auto pts = casemix::testing::random_points(rng, dims, 1 + t * 8, t % 2 == 0, 8);
        const auto got = casemix::find_non_dominated(pts, 1 + t % 4);
        EXPECT_EQ(got, ListArchive::find_non_dominated(pts));
        // Output is mutually non-dominated; each excluded point has a witness.
        for (const auto& a : got)
            for (const auto& b : got) EXPECT_FALSE(casemix::dominates(a, b));
        for (const auto& p : pts)
            if (std::find(got.begin(), got.end(), p) == got.end()) {
                bool witnessed = false;
                for (const auto& q : got) witnessed = witnessed || casemix::dominates(q, p);
                EXPECT_TRUE(witnessed);
            }
    }
}

}  // namespace
