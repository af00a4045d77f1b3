// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

// JSON documents for query answers, shared by the HTTP service and the
// command-line tool so both print the same bytes for the same question.
// Every archive answer carries the frontier box under "frontier".

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "casemix/analytics/queries.hpp"
#include "casemix/analytics/statistics.hpp"
#include "casemix/archive/archive.hpp"
#include "casemix/cam/model.hpp"
#include "casemix/common.hpp"
#include "casemix/generate/generator.hpp"

namespace casemix::io {

using Json = nlohmann::ordered_json;

inline constexpr std::size_t kDefaultPageSize = 100;

/// Canonical text of a document: two-space indent, trailing newline.
inline std::string render(const Json& doc) { return doc.dump(2) + "\n"; }

inline Json to_json(const Hypercube& h) {
    Json out = Json::array();
    for (const auto& iv : h.intervals) out.push_back(Json::array({iv.lb, iv.ub}));
    return out;
}

inline Json to_json(const analytics::SpreadStats& s) {
    return {{"mean", s.mean}, {"min", s.min}, {"q1", s.q1}, {"median", s.median}, {"q3", s.q3}, {"max", s.max}};
}

inline Json to_json(const analytics::GapStats& s) {
    Json out{{"mean", s.mean}, {"stddev", s.stddev}, {"cv", nullptr}, {"max_gap", s.max_gap}};
    if (s.cv) out["cv"] = *s.cv;
    return out;
}

inline Json point_entry(const Archive& a, std::size_t index) { return {{"index", index}, {"point", a.point(index)}}; }

inline Json frontier_of(const Archive& a) {
    const auto b = a.bounds();
    return b ? to_json(*b) : Json(nullptr);
}

struct Page {
    std::size_t number{0};  // 0-based
    std::size_t size{kDefaultPageSize};
};

/// GET /frontier/bounds
inline Json bounds_document(const Archive& a, std::span<const std::string> labels) {
    Json out{{"schema", "casemix-bounds/1"}, {"frontier", frontier_of(a)}, {"size", a.size()},
             {"labels", std::vector<std::string>(labels.begin(), labels.end())}, {"spread", Json::array()}};
    if (const auto s = analytics::analyse_spread(a.points()))
        for (const auto& d : *s) out["spread"].push_back(to_json(d));
    return out;
}

/// GET /frontier/point/{index}
inline Json point_document(const Archive& a, std::size_t index) {
    Json out{{"schema", "casemix-point/1"}, {"frontier", frontier_of(a)}, {"size", a.size()}};
    out.update(point_entry(a, index));
    return out;
}

/// GET /frontier/uniformity
inline Json uniformity_document(const Archive& a) {
    Json out{{"schema", "casemix-uniformity/1"}, {"frontier", frontier_of(a)}, {"size", a.size()},
             {"dimensions", nullptr}};
    if (const auto s = analytics::analyse_uniformity(a.points())) {
        out["dimensions"] = Json::array();
        for (const auto& d : *s) out["dimensions"].push_back(to_json(d));
    }
    return out;
}

/// Uniformity and spread together, raw or in frontier-box units.
inline Json stats_document(const Archive& a, std::span<const std::string> labels, bool normalized) {
    std::vector<Point> pts = a.points();
    if (normalized && !a.empty()) pts = analytics::normalize_points(pts, *a.bounds());
    Json out{{"schema", "casemix-stats/1"}, {"frontier", frontier_of(a)}, {"size", a.size()},
             {"labels", std::vector<std::string>(labels.begin(), labels.end())}, {"normalized", normalized},
             {"uniformity", nullptr}, {"spread", Json::array()}};
    if (const auto u = analytics::analyse_uniformity(pts)) {
        out["uniformity"] = Json::array();
        for (const auto& d : *u) out["uniformity"].push_back(to_json(d));
    }
    if (const auto s = analytics::analyse_spread(pts))
        for (const auto& d : *s) out["spread"].push_back(to_json(d));
    return out;
}

/// POST /query/range
inline Json range_document(const Archive& a, const analytics::RangeQueryResult& r, Page page = {}) {
    Json out{{"schema", "casemix-range/1"},
             {"frontier", to_json(r.frontier)},
             {"requested", to_json(r.requested)},
             {"clamped", r.clamped},
             {"total", r.candidates.size()},
             {"coverage_percent", r.coverage_percent},
             {"page", page.number},
             {"page_size", page.size},
             {"candidates", Json::array()},
             {"best", nullptr},
             {"achievable", nullptr},
             {"lines", analytics::render_nested_ranges(r.frontier, r.requested, r.achievable)}};
    const std::size_t begin = std::min(r.candidates.size(), page.number * page.size);
    const std::size_t end = std::min(r.candidates.size(), begin + page.size);
    for (std::size_t i = begin; i < end; ++i) out["candidates"].push_back(point_entry(a, r.candidates[i]));
    if (r.best) {
        out["best"] = point_entry(a, *r.best);
        out["best"]["progress"] = r.best_progress ? Json(*r.best_progress) : Json(nullptr);
    }
    if (r.achievable) out["achievable"] = to_json(*r.achievable);
    return out;
}

/// POST /query/goal
inline Json goal_document(const Archive& a, std::span<const double> goal, const analytics::OptimalityVerdict& v) {
    Json out{{"schema", "casemix-goal/1"},
             {"frontier", frontier_of(a)},
             {"goal", std::vector<double>(goal.begin(), goal.end())},
             {"dominated", v.dominated},
             {"verdict", v.dominated ? "inferior" : "not dominated"},
             {"alternative_count", v.alternative_count},
             {"alternatives", Json::array()},
             {"alternative_spread", Json::array()},
             {"closest", nullptr},
             {"change", nullptr}};
    std::vector<Point> alts;
    for (std::size_t i : v.alternatives) {
        out["alternatives"].push_back(point_entry(a, i));
        alts.push_back(a.point(i));
    }
    if (const auto s = analytics::analyse_spread(alts))
        for (const auto& d : *s) out["alternative_spread"].push_back(to_json(d));
    if (v.closest) {
        out["closest"] = point_entry(a, *v.closest);
        out["change"] = v.change;
    }
    return out;
}

inline Json bounds_report_document(std::span<const std::string> labels, const cam::BoundsReport& b,
                                   const std::vector<std::optional<double>>& published = {}) {
    Json out{{"schema", "casemix-instance-bounds/1"}, {"groups", Json::array()}, {"warnings", b.warnings}};
    for (std::size_t g = 0; g < b.upper.size(); ++g) {
        Json row{{"id", g < labels.size() ? labels[g] : "g" + std::to_string(g + 1)},
                 {"upper", b.upper[g]},
                 {"lower", g < b.lower.size() ? Json(b.lower[g]) : Json(nullptr)},
                 {"published_upper", nullptr}};
        if (g < published.size() && published[g]) row["published_upper"] = *published[g];
        out["groups"].push_back(std::move(row));
    }
    return out;
}

inline Json to_json(const generate::StageStats& s) {
    return {{"stage", s.stage},
            {"evaluated", s.sampling.evaluated},
            {"raw_feasible", s.sampling.raw_feasible},
            {"worker_rejected_duplicate", s.sampling.rejected_duplicate},
            {"worker_rejected_proximity", s.sampling.rejected_proximity},
            {"candidates", s.candidates},
            {"inserted", s.inserted},
            {"rejected_duplicate", s.rejected_duplicate},
            {"rejected_proximity", s.rejected_proximity},
            {"archive_size", s.archive_size},
            {"wall_seconds", s.wall_seconds}};
}

inline Json to_json(const generate::GeneratorConfig& c) {
    return {{"points", c.total_points},
            {"threads", c.threads},
            {"stage", c.stage_size},
            {"proximity", c.proximity},
            {"alg", static_cast<int>(c.algorithm)},
            {"seed", c.seed},
            {"lambda", c.evaluation.lambda},
            {"objective_group", c.evaluation.objective_group},
            {"correction_upfront", c.evaluation.correction_upfront}};
}

/// Generation report; wall times make it differ from run to run.
inline Json report_document(const generate::GenerationReport& r) {
    Json out{{"schema", "casemix-generation-report/1"},
             {"algorithm", generate::to_string(r.config.algorithm)},
             {"config", to_json(r.config)},
             {"upper_bounds", r.upper_bounds},
             {"stages_planned", r.stages_planned},
             {"stages_completed", r.stages_completed},
             {"evaluated", r.evaluated},
             {"generated", r.generated},
             {"raw_feasible", r.raw_feasible},
             {"feasibility_rate", r.feasibility_rate()},
             {"lp_solves", r.lp_solves},
             {"wall_seconds", r.wall_seconds},
             {"cancelled", r.cancelled},
             {"error", r.error ? Json(*r.error) : Json(nullptr)},
             {"stages", Json::array()}};
    for (const auto& s : r.stages) out["stages"].push_back(to_json(s));
    return out;
}

/// Reads a generator configuration; missing keys keep their defaults.
inline generate::GeneratorConfig parse_generator_config(const Json& j) {
    if (!j.is_object()) throw InputError("generator config must be an object");
    generate::GeneratorConfig c;
    auto count = [&](const char* key, std::uint64_t fallback) -> std::uint64_t {
        const auto it = j.find(key);
        if (it == j.end()) return fallback;
        if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
            throw InputError(std::string("config.") + key + " must be a non-negative integer");
        return it->get<std::uint64_t>();
    };
    auto real = [&](const char* key, double fallback) -> double {
        const auto it = j.find(key);
        if (it == j.end()) return fallback;
        if (!it->is_number()) throw InputError(std::string("config.") + key + " must be a number");
        return it->get<double>();
    };
    c.total_points = count("points", c.total_points);
    c.threads = static_cast<unsigned>(count("threads", c.threads));
    c.stage_size = count("stage", c.stage_size);
    c.proximity = real("proximity", c.proximity);
    c.seed = count("seed", c.seed);
    c.evaluation.lambda = real("lambda", c.evaluation.lambda);
    c.evaluation.objective_group = count("objective_group", c.evaluation.objective_group);
    if (const auto it = j.find("alg"); it != j.end())
        c.algorithm = generate::parse_algorithm(it->is_string() ? it->get<std::string>() : it->dump());
    if (const auto it = j.find("correction_upfront"); it != j.end()) {
        if (!it->is_boolean()) throw InputError("config.correction_upfront must be a boolean");
        c.evaluation.correction_upfront = it->get<bool>();
    }
    c.validate();
    return c;
}

}  // namespace casemix::io
