// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

// casemix: bounds, generation, queries and the HTTP service from the shell.
//
// Exit codes: 0 success, 1 usage, 2 bad data, 3 solver or runtime failure.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "casemix/analytics/queries.hpp"
#include "casemix/analytics/statistics.hpp"
#include "casemix/cam/model.hpp"
#include "casemix/generate/generator.hpp"
#include "casemix/io/archive_file.hpp"
#include "casemix/io/instance_file.hpp"
#include "casemix/io/json_codec.hpp"
#include "casemix/service/server.hpp"

namespace {

using namespace casemix;

constexpr int kUsage = 1;
constexpr int kDataError = 2;
constexpr int kRuntimeError = 3;

std::string fixed2(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf) == "-0.00" ? "0.00" : buf;
}

std::string case_mixes(std::size_t n) { return std::to_string(n) + (n == 1 ? " archived case mix is" : " archived case mixes are"); }

// Left-aligned first column, right-aligned rest.
void print_table(const std::vector<std::vector<std::string>>& rows) {
    std::vector<std::size_t> width;
    for (const auto& r : rows)
        for (std::size_t c = 0; c < r.size(); ++c) {
            if (width.size() <= c) width.push_back(0);
            width[c] = std::max(width[c], r[c].size());
        }
    for (const auto& r : rows) {
        std::string line;
        for (std::size_t c = 0; c < r.size(); ++c) {
            const std::string pad(width[c] - r[c].size(), ' ');
            line += c == 0 ? r[c] + pad : "  " + pad + r[c];
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        std::cout << line << '\n';
    }
}

std::vector<std::string> point_row(const std::string& head, std::span<const double> p) {
    std::vector<std::string> row{head};
    for (double v : p) row.push_back(fixed2(v));
    return row;
}

std::vector<std::string> label_row(const std::string& head, const std::vector<std::string>& labels) {
    std::vector<std::string> row{head};
    row.insert(row.end(), labels.begin(), labels.end());
    return row;
}

void warn(const std::vector<std::string>& warnings) {
    for (const auto& w : warnings) std::cerr << "warning: " << w << '\n';
}

int cmd_bounds(const std::string& path, bool json, bool skip_lower) {
    const auto loaded = io::load_instance(path);
    warn(loaded.warnings);
    const auto labels = loaded.instance.group_labels();
    const auto model = cam::build_cam(loaded.instance);
    auto rep = cam::compute_upper_bounds(model, labels);
    if (!skip_lower) rep.lower = cam::compute_lower_bounds(model, rep.upper);
    warn(rep.warnings);
    if (json) {
        std::cout << io::render(io::bounds_report_document(labels, rep, loaded.published_upper_bounds));
        return 0;
    }
    std::vector<std::vector<std::string>> rows{{"group", "upper", "lower", "published", "deviation %"}};
    double total = 0.0, published_total = 0.0;
    bool all_published = true;
    for (std::size_t g = 0; g < labels.size(); ++g) {
        const auto& pub = loaded.published_upper_bounds[g];
        total += rep.upper[g];
        all_published = all_published && pub.has_value();
        if (pub) published_total += *pub;
        rows.push_back({labels[g], fixed2(rep.upper[g]), skip_lower ? "-" : fixed2(rep.lower[g]),
                        pub ? fixed2(*pub) : "-",
                        pub && *pub != 0.0 ? fixed2(100.0 * (rep.upper[g] - *pub) / *pub) : "-"});
    }
    rows.push_back({"total", fixed2(total), "", all_published ? fixed2(published_total) : "-",
                    all_published && published_total != 0.0 ? fixed2(100.0 * (total - published_total) / published_total)
                                                             : "-"});
    print_table(rows);
    return 0;
}

struct GenerateArgs {
    std::string instance;
    generate::GeneratorConfig config;
    std::string alg{"1"};
    std::string out;
    std::string report;
    bool quiet{false};
    bool original_order{false};
};

int cmd_generate(GenerateArgs& a) {
    a.config.algorithm = generate::parse_algorithm(a.alg);
    a.config.evaluation.correction_upfront = !a.original_order;
    a.config.validate();
    const auto loaded = io::load_instance(a.instance);
    warn(loaded.warnings);
    const auto labels = loaded.instance.group_labels();
    if (a.config.evaluation.objective_group >= labels.size()) throw InputError("objective group is out of range");
    const auto model = cam::build_cam(loaded.instance);
    const auto bounds = cam::compute_upper_bounds(model, labels);
    warn(bounds.warnings);

    Archive archive(model.group_count());
    auto progress = [&](const generate::StageProgress& p) {
        if (a.quiet) return;
        const auto& s = *p.stats;
        std::cerr << "stage " << p.stage << "/" << p.stages_planned << ": archive " << s.archive_size << " (+"
                  << s.inserted << ", duplicate " << s.rejected_duplicate << ", proximity " << s.rejected_proximity
                  << ")\n";
    };
    const auto rep = generate::run_generation(model, bounds.upper, a.config, archive, progress);

    io::ArchiveHeader header;
    header.labels = labels;
    header.algorithm = generate::to_string(a.config.algorithm);
    header.total_points = a.config.total_points;
    header.threads = a.config.threads;
    header.stage_size = a.config.stage_size;
    header.proximity = a.config.proximity;
    header.seed = a.config.seed;
    io::save_archive(archive, header, a.out);

    auto doc = io::report_document(rep);
    doc["instance"] = a.instance;
    doc["archive"] = a.out;
    const std::string report_path = a.report.empty() ? a.out + ".report.json" : a.report;
    {
        std::ofstream f(report_path, std::ios::binary);
        if (!f) throw FormatError("cannot write '" + report_path + "'");
        f << io::render(doc);
    }
    std::cout << "generated " << rep.generated << " points from " << rep.evaluated << " grid points in "
              << rep.stages_completed << " stages; feasibility " << fixed2(100.0 * rep.feasibility_rate())
              << "%\narchive: " << a.out << "\nreport: " << report_path << '\n';
    if (rep.error) {
        std::cerr << "error: " << *rep.error << " (completed stages were saved)\n";
        return kRuntimeError;
    }
    return 0;
}

std::vector<std::string> labels_of(const io::ArchiveFile& f) { return f.header.labels; }

int cmd_range(const std::string& path, const std::vector<double>& low, const std::vector<double>& high, bool json,
              std::size_t page, std::size_t page_size) {
    const auto f = io::load_archive(path);
    const auto& a = f.archive;
    if (low.size() != a.dimension() || high.size() != a.dimension())
        throw InputError("--low and --high need " + std::to_string(a.dimension()) + " values each");
    if (a.empty()) throw InputError("archive is empty");
    if (page_size == 0) throw InputError("--page-size must be positive");
    const auto r = analytics::range_query_ext(a, Hypercube::from_bounds(low, high));
    if (json) {
        std::cout << io::render(io::range_document(a, r, {page, page_size}));
        return 0;
    }
    const auto labels = labels_of(f);
    std::cout << "candidates: " << r.candidates.size() << " of " << a.size() << " (coverage "
              << fixed2(r.coverage_percent) << "%)\n";
    if (r.clamped) std::cout << "request clamped to the frontier box\n";
    std::cout << "ranges (frontier, requested, achievable):\n";
    const auto lines = analytics::render_nested_ranges(r.frontier, r.requested, r.achievable);
    for (std::size_t k = 0; k < lines.size(); ++k) std::cout << "  " << labels[k] << ": " << lines[k] << '\n';
    if (r.best) {
        std::cout << "recommended: #" << *r.best << " progress "
                  << (r.best_progress ? fixed2(*r.best_progress) + "%" : std::string("n/a")) << '\n';
    }
    if (!r.candidates.empty()) {
        std::vector<std::vector<std::string>> rows{label_row("index", labels)};
        const std::size_t begin = std::min(r.candidates.size(), page * page_size);
        const std::size_t end = std::min(r.candidates.size(), begin + page_size);
        for (std::size_t i = begin; i < end; ++i)
            rows.push_back(point_row("#" + std::to_string(r.candidates[i]), a.point(r.candidates[i])));
        print_table(rows);
        if (end - begin < r.candidates.size())
            std::cout << "(showing " << begin << ".." << end << " of " << r.candidates.size() << ")\n";
    }
    return 0;
}

int cmd_goal(const std::string& path, const std::vector<double>& goal, bool json) {
    const auto f = io::load_archive(path);
    const auto& a = f.archive;
    if (goal.size() != a.dimension()) throw InputError("--point needs " + std::to_string(a.dimension()) + " values");
    const auto v = analytics::check_optimality(a, goal);
    if (json) {
        std::cout << io::render(io::goal_document(a, goal, v));
        return 0;
    }
    const auto labels = labels_of(f);
    if (v.dominated) {
        std::cout << "verdict: inferior; " << case_mixes(v.alternative_count) << " better in every group\n";
    } else {
        std::cout << "verdict: not dominated; " << case_mixes(v.alternative_count) << " no better in any group\n";
    }
    std::vector<Point> alts;
    for (std::size_t i : v.alternatives) alts.push_back(a.point(i));
    if (const auto s = analytics::analyse_spread(alts)) {
        std::vector<std::vector<std::string>> rows{label_row("alternatives", labels)};
        std::vector<std::string> mn{"min"}, md{"median"}, mx{"max"};
        for (const auto& d : *s) {
            mn.push_back(fixed2(d.min));
            md.push_back(fixed2(d.median));
            mx.push_back(fixed2(d.max));
        }
        rows.push_back(mn);
        rows.push_back(md);
        rows.push_back(mx);
        print_table(rows);
    }
    if (v.closest) {
        std::cout << "closest archived case mix: #" << *v.closest << '\n';
        print_table({label_row("", labels), point_row("goal", goal), point_row("closest", a.point(*v.closest)),
                     point_row("change", v.change)});
    }
    return 0;
}

int cmd_stats(const std::string& path, bool normalized, bool json) {
    const auto f = io::load_archive(path);
    const auto labels = labels_of(f);
    const auto doc = io::stats_document(f.archive, labels, normalized);
    if (json) {
        std::cout << io::render(doc);
        return 0;
    }
    std::cout << "points: " << f.archive.size() << (normalized ? " (normalized to the frontier box)" : "") << '\n';
    if (doc["uniformity"].is_null()) {
        std::cout << "uniformity: needs at least two points\n";
    } else {
        std::vector<std::vector<std::string>> rows{{"gaps", "mean", "stddev", "cv", "max"}};
        for (std::size_t k = 0; k < labels.size(); ++k) {
            const auto& u = doc["uniformity"][k];
            rows.push_back({labels[k], fixed2(u["mean"].get<double>()), fixed2(u["stddev"].get<double>()),
                            u["cv"].is_null() ? "-" : fixed2(u["cv"].get<double>()), fixed2(u["max_gap"].get<double>())});
        }
        print_table(rows);
    }
    if (!doc["spread"].empty()) {
        std::vector<std::vector<std::string>> rows{{"spread", "mean", "min", "q1", "median", "q3", "max"}};
        for (std::size_t k = 0; k < labels.size(); ++k) {
            const auto& s = doc["spread"][k];
            std::vector<std::string> row{labels[k]};
            for (const char* key : {"mean", "min", "q1", "median", "q3", "max"}) row.push_back(fixed2(s[key].get<double>()));
            rows.push_back(row);
        }
        print_table(rows);
    }
    return 0;
}

int cmd_serve(const std::string& source, const std::string& extra_archive, const std::string& host, int port) {
    service::Service svc;
    auto load = [&](const std::string& path) {
        if (std::filesystem::path(path).extension() == ".json") {
            auto inst = io::load_instance(path);
            warn(inst.warnings);
            svc.set_instance(std::move(inst));
        } else {
            auto f = io::load_archive(path);
            svc.set_archive(std::move(f.archive), f.header.labels);
        }
    };
    load(source);
    if (!extra_archive.empty()) load(extra_archive);
    if (port < 0) {
        const char* env = std::getenv("CASEMIX_PORT");
        port = env ? std::atoi(env) : 8080;
    }
    const int bound = svc.bind(host, port);
    if (bound < 0) throw std::runtime_error("cannot bind " + host + ":" + std::to_string(port));
    std::cout << "listening on http://" << host << ":" << bound << std::endl;
    return svc.listen() ? 0 : kRuntimeError;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hospital case-mix frontier generation and queries"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "casemix 0.1.0");
    bool json = false;

    std::string bounds_path;
    bool skip_lower = false;
    auto* bounds = app.add_subcommand("bounds", "Per-group upper and lower bounds of an instance");
    bounds->add_option("instance", bounds_path, "Instance file")->required()->check(CLI::ExistingFile);
    bounds->add_flag("--no-lower", skip_lower, "Skip the lexicographic lower bounds");
    bounds->add_flag("--json", json, "Print JSON");

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "Generate an archive of efficient case mixes");
    generate->add_option("instance", gen.instance, "Instance file")->required()->check(CLI::ExistingFile);
    generate->add_option("--points,-I", gen.config.total_points, "Grid points to evaluate")->required();
    generate->add_option("--threads,-J", gen.config.threads, "Worker threads")->capture_default_str();
    generate->add_option("--stage,-S", gen.config.stage_size, "Grid points per thread per stage")->capture_default_str();
    generate->add_option("--proximity", gen.config.proximity, "Minimum distance between archived points")
        ->capture_default_str();
    generate->add_option("--alg", gen.alg, "1: sequential merge, 2: prune and rebuild")->capture_default_str();
    generate->add_option("--seed", gen.config.seed, "Random seed")->capture_default_str();
    generate->add_option("--lambda", gen.config.evaluation.lambda, "Weight of the surplus reward")->capture_default_str();
    generate->add_option("--objective-group", gen.config.evaluation.objective_group, "Group maximized by each solve")
        ->capture_default_str();
    generate->add_flag("--ecm-first", gen.original_order, "Try the epsilon-constraint model before correcting");
    generate->add_option("--out", gen.out, "Archive file to write")->required();
    generate->add_option("--report", gen.report, "Report file (default: <out>.report.json)");
    generate->add_flag("--quiet", gen.quiet, "No per-stage progress on stderr");

    auto* query = app.add_subcommand("query", "Query an archive");
    query->require_subcommand(1);
    std::string range_path, goal_path;
    std::vector<double> low, high, goal;
    std::size_t page = 0, page_size = io::kDefaultPageSize;
    auto* range = query->add_subcommand("range", "Case mixes inside a box");
    range->add_option("archive", range_path, "Archive file")->required()->check(CLI::ExistingFile);
    range->add_option("--low", low, "Lower bounds, comma separated")->required()->delimiter(',');
    range->add_option("--high", high, "Upper bounds, comma separated")->required()->delimiter(',');
    range->add_option("--page", page, "Candidate page (0-based)")->capture_default_str();
    range->add_option("--page-size", page_size, "Candidates per page")->capture_default_str();
    range->add_flag("--json", json, "Print JSON");
    auto* goal_cmd = query->add_subcommand("goal", "Is a target case mix attainable, and what is close to it");
    goal_cmd->add_option("archive", goal_path, "Archive file")->required()->check(CLI::ExistingFile);
    goal_cmd->add_option("--point", goal, "Target case mix, comma separated")->required()->delimiter(',');
    goal_cmd->add_flag("--json", json, "Print JSON");

    std::string stats_path;
    bool normalized = false;
    auto* stats = app.add_subcommand("stats", "Uniformity and spread of an archive");
    stats->add_option("archive", stats_path, "Archive file")->required()->check(CLI::ExistingFile);
    stats->add_flag("--normalized", normalized, "Scale every objective to the frontier box first");
    stats->add_flag("--json", json, "Print JSON");

    std::string serve_source, serve_archive, host = "127.0.0.1";
    int port = -1;
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    serve->add_option("source", serve_source, "Archive file, or instance file (.json)")->required()->check(CLI::ExistingFile);
    serve->add_option("--archive", serve_archive, "Archive to serve alongside an instance")->check(CLI::ExistingFile);
    serve->add_option("--host", host, "Address to bind")->capture_default_str();
    serve->add_option("--port", port, "Port (default: $CASEMIX_PORT or 8080; 0 picks a free one)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*bounds) return cmd_bounds(bounds_path, json, skip_lower);
        if (*generate) return cmd_generate(gen);
        if (*range) return cmd_range(range_path, low, high, json, page, page_size);
        if (*goal_cmd) return cmd_goal(goal_path, goal, json);
        if (*stats) return cmd_stats(stats_path, normalized, json);
        if (*serve) return cmd_serve(serve_source, serve_archive, host, port);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kRuntimeError;
    }
    return kUsage;
}
