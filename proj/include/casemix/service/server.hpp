// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#pragma once

// HTTP facade over one archive slot and, optionally, one hospital instance.
//
//   GET  /frontier/bounds              frontier box, size, spread per objective
//   GET  /frontier/point/{index}       one stored case mix
//   GET  /frontier/points?page=&page_size=
//   GET  /frontier/uniformity          gap statistics per objective
//   POST /query/range  {low, high, page?, page_size?}
//   POST /query/goal   {point}
//   POST /generate     {points, threads, stage, proximity, alg, seed, ...}
//   GET  /generate/{id}/progress
//
// Errors are {"error": message, "status": code}: 400 malformed request, 404
// nothing loaded or no such point/job, 409 a generation job is running, 422
// dimension mismatch. Reads see the archive as of the last completed stage
// of a running job; the slot is swapped atomically between stages.

#include <charconv>
#include <condition_variable>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <stop_token>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <httplib.h>

#include "casemix/analytics/queries.hpp"
#include "casemix/archive/archive.hpp"
#include "casemix/cam/model.hpp"
#include "casemix/generate/generator.hpp"
#include "casemix/io/archive_file.hpp"
#include "casemix/io/instance_file.hpp"
#include "casemix/io/json_codec.hpp"

namespace casemix::service {

using io::Json;

/// A request the client got wrong; carries the HTTP status to answer with.
class RequestError : public std::runtime_error {
public:
    RequestError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

struct Dataset {
    Archive archive;
    std::vector<std::string> labels;
};

enum class JobState { kRunning, kFinished, kFailed, kCancelled };

inline const char* to_string(JobState s) noexcept {
    switch (s) {
        case JobState::kRunning: return "running";
        case JobState::kFinished: return "finished";
        case JobState::kFailed: return "failed";
        case JobState::kCancelled: return "cancelled";
    }
    return "unknown";
}

struct ServiceOptions {
    std::string cors_origin{"*"};
    std::size_t max_page_size{1000};
};

class Service {
public:
    explicit Service(ServiceOptions options = {}) : options_(std::move(options)) { routes(); }

    ~Service() {
        stop();
        std::lock_guard lock(jobs_mutex_);
        for (auto& [id, job] : jobs_) job->thread.request_stop();
        for (auto& [id, job] : jobs_)
            if (job->thread.joinable()) job->thread.join();
    }

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    void set_instance(io::LoadedInstance instance) {
        std::lock_guard lock(instance_mutex_);
        instance_ = std::make_shared<const io::LoadedInstance>(std::move(instance));
    }

    void set_archive(Archive archive, std::vector<std::string> labels = {}) {
        if (labels.empty()) labels = io::default_labels(archive.dimension());
        publish(std::make_shared<const Dataset>(Dataset{std::move(archive), std::move(labels)}));
    }

    std::shared_ptr<const Dataset> snapshot() const {
        std::lock_guard lock(data_mutex_);
        return data_;
    }

    /// Binds to `port` (0 picks a free one) and returns the bound port, or -1.
    int bind(const std::string& host, int port) {
        if (port == 0) return server_.bind_to_any_port(host);
        return server_.bind_to_port(host, port) ? port : -1;
    }

    /// Serves until stop(); blocks the calling thread.
    bool listen() { return server_.listen_after_bind(); }
    void wait_until_ready() const { server_.wait_until_ready(); }
    void stop() { server_.stop(); }

    /// Blocks until job `id` is no longer running. Returns false for an
    /// unknown id.
    bool wait_for_job(std::uint64_t id) {
        std::shared_ptr<Job> job;
        {
            std::lock_guard lock(jobs_mutex_);
            const auto it = jobs_.find(id);
            if (it == jobs_.end()) return false;
            job = it->second;
        }
        std::unique_lock lock(job->mutex);
        job->done.wait(lock, [&] { return job->state != JobState::kRunning; });
        return true;
    }

private:
    struct Job {
        std::uint64_t id{0};
        std::mutex mutex;
        std::condition_variable done;
        JobState state{JobState::kRunning};
        std::uint64_t stage{0};
        std::uint64_t stages_planned{0};
        std::uint64_t points{0};
        std::uint64_t evaluated{0};
        std::optional<generate::GenerationReport> report;
        std::string error;
        std::jthread thread;
    };

    void publish(std::shared_ptr<const Dataset> d) {
        std::lock_guard lock(data_mutex_);
        data_ = std::move(d);
    }

    std::shared_ptr<const Dataset> require_data() const {
        auto d = snapshot();
        if (!d) throw RequestError(404, "no archive loaded");
        return d;
    }

    static Json parse_body(const httplib::Request& req) {
        try {
            return Json::parse(req.body);
        } catch (const Json::parse_error& e) {
            throw RequestError(400, std::string("malformed JSON body: ") + e.what());
        }
    }

    static std::vector<double> number_array(const Json& body, const char* key) {
        const auto it = body.find(key);
        if (it == body.end()) throw RequestError(400, std::string("missing '") + key + "'");
        if (!it->is_array()) throw RequestError(400, std::string("'") + key + "' must be an array of numbers");
        std::vector<double> out;
        for (const auto& v : *it) {
            if (!v.is_number()) throw RequestError(400, std::string("'") + key + "' must be an array of numbers");
            out.push_back(v.get<double>());
        }
        return out;
    }

    static std::size_t index_value(const std::string& text, const char* what) {
        std::size_t value = 0;
        const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (ec != std::errc() || ptr != text.data() + text.size())
            throw RequestError(400, std::string(what) + " must be a non-negative integer");
        return value;
    }

    io::Page page_from(const httplib::Request& req, const Json* body) const {
        io::Page page;
        auto read = [&](const char* key, std::size_t& target) {
            if (req.has_param(key)) target = index_value(req.get_param_value(key), key);
            if (body && body->contains(key)) {
                const auto& v = (*body)[key];
                if (!v.is_number_unsigned()) throw RequestError(400, std::string(key) + " must be a non-negative integer");
                target = v.get<std::size_t>();
            }
        };
        read("page", page.number);
        read("page_size", page.size);
        if (page.size == 0 || page.size > options_.max_page_size)
            throw RequestError(400, "page_size must be between 1 and " + std::to_string(options_.max_page_size));
        return page;
    }

    static void check_dimension(std::size_t got, const Dataset& d, const char* what) {
        if (got != d.archive.dimension())
            throw RequestError(422, std::string(what) + " has " + std::to_string(got) + " values, archive has " +
                                        std::to_string(d.archive.dimension()) + " objectives");
    }

    template <class F>
    httplib::Server::Handler wrap(F f) {
        return [f = std::move(f)](const httplib::Request& req, httplib::Response& res) {
            int status = 200;
            Json body;
            try {
                body = f(req, status);
            } catch (const RequestError& e) {
                status = e.status();
                body = {{"error", e.what()}, {"status", status}};
            } catch (const InputError& e) {
                status = 400;
                body = {{"error", e.what()}, {"status", status}};
            } catch (const std::exception& e) {
                status = 500;
                body = {{"error", e.what()}, {"status", status}};
            }
            res.status = status;
            res.set_content(io::render(body), "application/json");
        };
    }

    void routes() {
        server_.set_default_headers({{"Access-Control-Allow-Origin", options_.cors_origin},
                                     {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                     {"Access-Control-Allow-Headers", "Content-Type"}});
        server_.Options(".*", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

        server_.Get("/frontier/bounds", wrap([this](const httplib::Request&, int&) {
                        const auto d = require_data();
                        return io::bounds_document(d->archive, d->labels);
                    }));
        server_.Get(R"(/frontier/point/([^/]+))", wrap([this](const httplib::Request& req, int&) {
                        const auto d = require_data();
                        const std::size_t i = index_value(req.matches[1], "point index");
                        if (i >= d->archive.size())
                            throw RequestError(404, "point " + std::to_string(i) + " not in archive of " +
                                                        std::to_string(d->archive.size()));
                        return io::point_document(d->archive, i);
                    }));
        server_.Get("/frontier/points", wrap([this](const httplib::Request& req, int&) {
                        const auto d = require_data();
                        const auto page = page_from(req, nullptr);
                        Json out{{"schema", "casemix-points/1"}, {"frontier", io::frontier_of(d->archive)},
                                 {"total", d->archive.size()}, {"page", page.number}, {"page_size", page.size},
                                 {"points", Json::array()}};
                        const std::size_t begin = std::min(d->archive.size(), page.number * page.size);
                        const std::size_t end = std::min(d->archive.size(), begin + page.size);
                        for (std::size_t i = begin; i < end; ++i) out["points"].push_back(io::point_entry(d->archive, i));
                        return out;
                    }));
        server_.Get("/frontier/uniformity", wrap([this](const httplib::Request&, int&) {
                        return io::uniformity_document(require_data()->archive);
                    }));
        server_.Post("/query/range", wrap([this](const httplib::Request& req, int&) {
                         const auto d = require_data();
                         const Json body = parse_body(req);
                         const auto low = number_array(body, "low");
                         const auto high = number_array(body, "high");
                         check_dimension(low.size(), *d, "low");
                         check_dimension(high.size(), *d, "high");
                         if (d->archive.empty()) throw RequestError(404, "archive is empty");
                         const auto page = page_from(req, &body);
                         const auto r = analytics::range_query_ext(d->archive, Hypercube::from_bounds(low, high));
                         return io::range_document(d->archive, r, page);
                     }));
        server_.Post("/query/goal", wrap([this](const httplib::Request& req, int&) {
                         const auto d = require_data();
                         const Json body = parse_body(req);
                         const auto goal = number_array(body, "point");
                         check_dimension(goal.size(), *d, "point");
                         return io::goal_document(d->archive, goal, analytics::check_optimality(d->archive, goal));
                     }));
        server_.Post("/generate", wrap([this](const httplib::Request& req, int& status) {
                         const Json body = parse_body(req);
                         const Json& cfg = body.contains("config") ? body["config"] : body;
                         generate::GeneratorConfig config;
                         try {
                             config = io::parse_generator_config(cfg);
                         } catch (const InputError& e) {
                             throw RequestError(400, e.what());
                         }
                         const auto id = start_job(config);
                         status = 202;
                         return Json{{"job", id}, {"progress", "/generate/" + std::to_string(id) + "/progress"}};
                     }));
        server_.Get(R"(/generate/([^/]+)/progress)", wrap([this](const httplib::Request& req, int&) {
                        const auto id = index_value(req.matches[1], "job id");
                        std::shared_ptr<Job> job;
                        {
                            std::lock_guard lock(jobs_mutex_);
                            const auto it = jobs_.find(id);
                            if (it == jobs_.end()) throw RequestError(404, "no job " + std::to_string(id));
                            job = it->second;
                        }
                        std::lock_guard lock(job->mutex);
                        Json out{{"job", job->id},
                                 {"state", to_string(job->state)},
                                 {"stage", job->stage},
                                 {"stages", job->stages_planned},
                                 {"points", job->points},
                                 {"evaluated", job->evaluated},
                                 {"error", job->error.empty() ? Json(nullptr) : Json(job->error)},
                                 {"report", nullptr}};
                        if (job->report) out["report"] = io::report_document(*job->report);
                        return out;
                    }));
    }

    std::uint64_t start_job(const generate::GeneratorConfig& config) {
        std::shared_ptr<const io::LoadedInstance> inst;
        {
            std::lock_guard lock(instance_mutex_);
            inst = instance_;
        }
        if (!inst) throw RequestError(404, "no hospital instance loaded");
        if (config.evaluation.objective_group >= inst->instance.groups.size())
            throw RequestError(422, "objective_group is outside the instance's groups");

        std::lock_guard lock(jobs_mutex_);
        for (const auto& [id, j] : jobs_) {
            std::lock_guard jl(j->mutex);
            if (j->state == JobState::kRunning) throw RequestError(409, "generation job " + std::to_string(id) + " is running");
        }
        auto job = std::make_shared<Job>();
        job->id = ++last_job_id_;
        job->stages_planned = config.stage_count();
        jobs_[job->id] = job;
        job->thread = std::jthread([this, job, inst, config](std::stop_token stop) {
            run_job(*job, *inst, config, std::move(stop));
        });
        return job->id;
    }

    void run_job(Job& job, const io::LoadedInstance& inst, const generate::GeneratorConfig& config,
                 std::stop_token stop) {
        const auto labels = inst.instance.group_labels();
        auto finish = [&](JobState state, std::string error) {
            std::lock_guard lock(job.mutex);
            job.state = state;
            job.error = std::move(error);
            job.done.notify_all();
        };
        try {
            const auto model = cam::build_cam(inst.instance);
            const auto bounds = cam::compute_upper_bounds(model, labels);
            Archive master(model.group_count());
            std::uint64_t evaluated = 0;
            auto on_stage = [&](const generate::StageProgress& p) {
                evaluated += p.stats->sampling.evaluated;
                publish(std::make_shared<const Dataset>(Dataset{*p.archive, labels}));
                std::lock_guard lock(job.mutex);
                job.stage = p.stage;
                job.points = p.archive->size();
                job.evaluated = evaluated;
            };
            auto report = generate::run_generation(model, bounds.upper, config, master, on_stage, stop);
            {
                std::lock_guard lock(job.mutex);
                job.report = report;
            }
            if (report.error) return finish(JobState::kFailed, *report.error);
            finish(report.cancelled ? JobState::kCancelled : JobState::kFinished, "");
        } catch (const std::exception& e) {
            finish(JobState::kFailed, e.what());
        }
    }

    ServiceOptions options_;
    httplib::Server server_;
    mutable std::mutex data_mutex_;
    std::shared_ptr<const Dataset> data_;
    std::mutex instance_mutex_;
    std::shared_ptr<const io::LoadedInstance> instance_;
    std::mutex jobs_mutex_;
    std::map<std::uint64_t, std::shared_ptr<Job>> jobs_;
    std::uint64_t last_job_id_{0};
};

}  // namespace casemix::service
