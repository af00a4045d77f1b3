// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

// Archive generation by random epsilon-constraint sampling.
//
// rcecm() is the serial sampler: draw epsilon uniformly in the box [0, upper],
// turn it into an efficient case mix, keep it if it is new and has no close
// neighbour. The staged drivers run J samplers in parallel for ceil(I/(J S))
// stages and consolidate after each stage:
//
//   kMergeSequential  every candidate is re-checked against the master
//                     archive, one at a time (full proximity guarantee);
//   kPruneAndRebuild  workers prune against a frozen copy of the master taken
//                     at stage start, then the master is rebuilt balanced from
//                     the union (candidates of one stage are not checked
//                     against each other for proximity).

#include <chrono>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "casemix/archive/archive.hpp"
#include "casemix/cam/model.hpp"
#include "casemix/common.hpp"

namespace casemix::generate {

enum class Algorithm { kMergeSequential = 1, kPruneAndRebuild = 2 };

inline std::string to_string(Algorithm a) { return a == Algorithm::kMergeSequential ? "prcecm01" : "prcecm02"; }

inline Algorithm parse_algorithm(std::string_view s) {
    if (s == "1" || s == "prcecm01") return Algorithm::kMergeSequential;
    if (s == "2" || s == "prcecm02") return Algorithm::kPruneAndRebuild;
    throw InputError("unknown algorithm '" + std::string(s) + "' (expected 1 or 2)");
}

struct GeneratorConfig {
    std::uint64_t total_points{1000};  // I: grid points evaluated, at most
    unsigned threads{1};               // J
    std::uint64_t stage_size{100};     // S: grid points per worker per stage
    double proximity{0.0};             // closed-ball radius in patient units
    std::uint64_t seed{0};
    Algorithm algorithm{Algorithm::kMergeSequential};
    cam::EvaluationOptions evaluation{};

    void validate() const {
        if (total_points == 0) throw InputError("total points must be positive");
        if (threads == 0) throw InputError("threads must be positive");
        if (stage_size == 0) throw InputError("points per thread per stage must be positive");
        if (!(proximity >= 0.0) || !std::isfinite(proximity)) throw InputError("proximity must be finite and >= 0");
        if (!(evaluation.lambda >= 0.0) || !std::isfinite(evaluation.lambda)) throw InputError("lambda must be >= 0");
    }

    /// ceil(I / (J S)); the last stage is trimmed so no more than I points
    /// are evaluated in total.
    std::uint64_t stage_count() const {
        const std::uint64_t per_stage = std::uint64_t{threads} * stage_size;
        return (total_points + per_stage - 1) / per_stage;
    }

    /// Grid points worker j evaluates in stage s (0-based).
    std::uint64_t worker_quota(std::uint64_t stage, unsigned worker) const {
        const std::uint64_t start = stage * threads * stage_size + std::uint64_t{worker} * stage_size;
        if (start >= total_points) return 0;
        return std::min(stage_size, total_points - start);
    }
};

/// Independent stream per (seed, stage, worker), so results do not depend on
/// thread scheduling.
inline std::mt19937_64 worker_stream(std::uint64_t seed, std::uint64_t stage, unsigned worker) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stage), static_cast<std::uint32_t>(stage >> 32),
                      static_cast<std::uint32_t>(worker)};
    return std::mt19937_64(seq);
}

struct SamplerStats {
    std::uint64_t evaluated{0};
    std::uint64_t raw_feasible{0};
    std::uint64_t lp_solves{0};
    std::uint64_t inserted{0};
    std::uint64_t rejected_duplicate{0};
    std::uint64_t rejected_proximity{0};

    SamplerStats& operator+=(const SamplerStats& o) {
        evaluated += o.evaluated;
        raw_feasible += o.raw_feasible;
        lp_solves += o.lp_solves;
        inserted += o.inserted;
        rejected_duplicate += o.rejected_duplicate;
        rejected_proximity += o.rejected_proximity;
        return *this;
    }
};

struct StageStats {
    std::uint64_t stage{0};       // 1-based
    SamplerStats sampling;        // summed over the workers' private archives
    std::uint64_t candidates{0};  // points handed to consolidation
    std::uint64_t inserted{0};
    std::uint64_t rejected_duplicate{0};
    std::uint64_t rejected_proximity{0};
    std::uint64_t archive_size{0};  // master size after the stage
    double wall_seconds{0.0};
};

struct GenerationReport {
    GeneratorConfig config;
    std::vector<double> upper_bounds;
    std::uint64_t stages_planned{0};
    std::uint64_t stages_completed{0};
    std::uint64_t evaluated{0};
    std::uint64_t generated{0};  // final archive size
    std::uint64_t raw_feasible{0};
    std::uint64_t lp_solves{0};
    double wall_seconds{0.0};
    std::vector<StageStats> stages;
    std::optional<std::string> error;  // set when a stage failed; earlier stages are kept
    bool cancelled{false};

    double feasibility_rate() const noexcept {
        return evaluated == 0 ? 0.0 : static_cast<double>(raw_feasible) / static_cast<double>(evaluated);
    }
};

/// True when no archive member lies within the closed ball of radius
/// `proximity` around `a`. Radius 0 never rejects; exact duplicates are the
/// membership test's business.
inline bool no_close_neighbours(const Archive& archive, std::span<const double> a, double proximity) {
    if (proximity < 0.0) throw InputError("proximity must be >= 0");
    if (proximity == 0.0) return true;
    return archive.no_close_neighbours(a, proximity);
}

/// Serial sampler: evaluates `count` uniform grid points in [0, upper] and
/// inserts the results into `target` under the duplicate and proximity
/// guards. `guard`, when given, is a further read-only archive the new
/// point must also be new to and clear of.
template <class Rng>
void rcecm(const cam::CamModel& model, std::span<const double> upper, std::uint64_t count, Archive& target, Rng& rng,
           double proximity, const cam::EvaluationOptions& options, SamplerStats& stats,
           const Archive* guard = nullptr, const lp::LpSolver& solver = cam::default_solver()) {
    const std::size_t G = model.group_count();
    if (upper.size() != G) throw InputError("upper bounds do not match the model");
    if (target.dimension() != G && !(target.empty() && target.dimension() == 0))
        throw InputError("target archive dimension does not match the model");
    std::vector<double> eps(G);
    for (std::uint64_t i = 0; i < count; ++i) {
        for (std::size_t g = 0; g < G; ++g) eps[g] = std::uniform_real_distribution<double>(0.0, upper[g])(rng);
        const auto res = cam::evaluate_gridpoint(model, eps, upper, options, solver);
        ++stats.evaluated;
        stats.lp_solves += res.lp_solves;
        stats.raw_feasible += res.raw_feasible;
        const Point& n = res.mix.n;
        if (target.is_in(n) || (guard && guard->is_in(n))) {
            ++stats.rejected_duplicate;
            continue;
        }
        if (!no_close_neighbours(target, n, proximity) || (guard && !no_close_neighbours(*guard, n, proximity))) {
            ++stats.rejected_proximity;
            continue;
        }
        target.insert(n);
        ++stats.inserted;
    }
}

struct StageProgress {
    std::uint64_t stage{0};
    std::uint64_t stages_planned{0};
    const StageStats* stats{nullptr};
    const Archive* archive{nullptr};  // master after the stage's consolidation
};

using ProgressCallback = std::function<void(const StageProgress&)>;

/// Staged parallel generation into `master` (normally empty). Stops early on
/// a worker failure (recorded in the report) or when `stop` is requested.
/// `solver` is shared by the workers and must be safe to call concurrently.
inline GenerationReport run_generation(const cam::CamModel& model, std::span<const double> upper,
                                       const GeneratorConfig& config, Archive& master,
                                       const ProgressCallback& on_stage = {}, std::stop_token stop = {},
                                       const lp::LpSolver& solver = cam::default_solver()) {
    config.validate();
    const std::size_t G = model.group_count();
    if (upper.size() != G) throw InputError("upper bounds do not match the model");
    if (master.empty() && master.dimension() != G) master = Archive(G);
    if (master.dimension() != G) throw InputError("archive dimension does not match the model");

    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    GenerationReport rep;
    rep.config = config;
    rep.upper_bounds.assign(upper.begin(), upper.end());
    rep.stages_planned = config.stage_count();

    const unsigned J = config.threads;
    std::vector<Archive> local(J, Archive(G));
    std::vector<SamplerStats> stats(J);
    std::vector<std::exception_ptr> failure(J);

    for (std::uint64_t s = 0; s < rep.stages_planned; ++s) {
        if (stop.stop_requested()) {
            rep.cancelled = true;
            break;
        }
        const auto ts = clock::now();
        // Frozen view of the master for in-stage pruning (prune-and-rebuild).
        const Archive* guard = config.algorithm == Algorithm::kPruneAndRebuild ? &master : nullptr;
        auto work = [&](unsigned j) {
            try {
                local[j].clear();
                stats[j] = {};
                auto rng = worker_stream(config.seed, s, j);
                rcecm(model, upper, config.worker_quota(s, j), local[j], rng, config.proximity, config.evaluation,
                      stats[j], guard, solver);
            } catch (...) {
                failure[j] = std::current_exception();
            }
        };
        {
            std::vector<std::jthread> pool;
            pool.reserve(J);
            for (unsigned j = 1; j < J; ++j) pool.emplace_back(work, j);
            work(0);
        }

        StageStats st;
        st.stage = s + 1;
        for (unsigned j = 0; j < J; ++j) st.sampling += stats[j];
        std::optional<std::string> error;
        for (unsigned j = 0; j < J; ++j) {
            if (!failure[j]) continue;
            try {
                std::rethrow_exception(failure[j]);
            } catch (const std::exception& e) {
                error = "stage " + std::to_string(s + 1) + " worker " + std::to_string(j) + ": " + e.what();
            } catch (...) {
                error = "stage " + std::to_string(s + 1) + " worker " + std::to_string(j) + ": unknown failure";
            }
            break;
        }
        rep.evaluated += st.sampling.evaluated;
        rep.raw_feasible += st.sampling.raw_feasible;
        rep.lp_solves += st.sampling.lp_solves;
        if (error) {
            rep.error = std::move(error);
            break;
        }

        if (config.algorithm == Algorithm::kMergeSequential) {
            for (unsigned j = 0; j < J; ++j)
                for (const auto& p : local[j].points()) {
                    ++st.candidates;
                    if (master.is_in(p)) {
                        ++st.rejected_duplicate;
                    } else if (!no_close_neighbours(master, p, config.proximity)) {
                        ++st.rejected_proximity;
                    } else {
                        master.insert(p);
                        ++st.inserted;
                    }
                }
        } else {
            // Already pruned against the stage-start master; only repeats
            // across workers remain to be dropped.
            std::vector<Point> all = master.points();
            Archive fresh(G);
            for (unsigned j = 0; j < J; ++j)
                for (const auto& p : local[j].points()) {
                    ++st.candidates;
                    if (fresh.insert(p) == InsertOutcome::kDuplicate) {
                        ++st.rejected_duplicate;
                        continue;
                    }
                    all.push_back(p);
                    ++st.inserted;
                }
            master = all.empty() ? Archive(G) : Archive::make(std::move(all));
        }
        st.archive_size = master.size();
        st.wall_seconds = std::chrono::duration<double>(clock::now() - ts).count();
        rep.stages.push_back(st);
        rep.stages_completed = s + 1;
        if (on_stage) on_stage({s + 1, rep.stages_planned, &rep.stages.back(), &master});
    }
    rep.generated = master.size();
    rep.wall_seconds = std::chrono::duration<double>(clock::now() - t0).count();
    return rep;
}

/// Convenience wrapper: builds the model, computes the upper bounds, and
/// generates into a fresh archive.
struct GenerationResult {
    Archive archive;
    GenerationReport report;
};

inline GenerationResult generate(const cam::HospitalInstance& instance, const GeneratorConfig& config,
                                 const ProgressCallback& on_stage = {}, std::stop_token stop = {}) {
    const auto model = cam::build_cam(instance);
    const auto bounds = cam::compute_upper_bounds(model, instance.group_labels());
    GenerationResult out{Archive(model.group_count()), {}};
    out.report = run_generation(model, bounds.upper, config, out.archive, on_stage, std::move(stop));
    return out;
}

inline GenerationResult prcecm01(const cam::HospitalInstance& instance, GeneratorConfig config) {
    config.algorithm = Algorithm::kMergeSequential;
    return generate(instance, config);
}

inline GenerationResult prcecm02(const cam::HospitalInstance& instance, GeneratorConfig config) {
    config.algorithm = Algorithm::kPruneAndRebuild;
    return generate(instance, config);
}

}  // namespace casemix::generate
