// SPDX-License-Identifier: Apache-2.0
// SPDX-FileCopyrightText: Copyright 2026 The casemix authors

#include <gtest/gtest.h>

#include <atomic>
#include <chrono>
#include <memory>
#include <thread>

#include "casemix/service/server.hpp"

namespace {

using casemix::Archive;
using casemix::Point;
using casemix::io::Json;
namespace io = casemix::io;
namespace svc = casemix::service;

std::string data(const char* name) { return std::string(CASEMIX_DATA_DIR) + "/" + name; }

// Runs a service on a free port for the lifetime of the fixture.
class Served : public ::testing::Test {
protected:
    void SetUp() override {
        service = std::make_unique<svc::Service>();
        port = service->bind("127.0.0.1", 0);
        ASSERT_GT(port, 0);
        listener = std::thread([this] { service->listen(); });
        service->wait_until_ready();
        client = std::make_unique<httplib::Client>("127.0.0.1", port);
        client->set_read_timeout(60, 0);
    }

    void TearDown() override {
        service->stop();
        listener.join();
    }

    void load_example30() {
        auto f = io::load_archive(data("example30.archive"));
        service->set_archive(std::move(f.archive), f.header.labels);
    }

    std::pair<int, Json> get(const std::string& path) {
        const auto res = client->Get(path);
        EXPECT_TRUE(res) << path;
        if (!res) return {0, {}};
        return {res->status, Json::parse(res->body)};
    }

    std::pair<int, Json> post(const std::string& path, const std::string& body) {
        const auto res = client->Post(path, body, "application/json");
        EXPECT_TRUE(res) << path;
        if (!res) return {0, {}};
        return {res->status, Json::parse(res->body)};
    }

    std::unique_ptr<svc::Service> service;
    int port{0};
    std::thread listener;
    std::unique_ptr<httplib::Client> client;
};

TEST_F(Served, NothingLoadedIs404) {
    EXPECT_EQ(get("/frontier/bounds").first, 404);
    EXPECT_EQ(post("/query/range", R"({"low":[0],"high":[1]})").first, 404);
    EXPECT_EQ(post("/generate", R"({"points":10})").first, 404);
    EXPECT_EQ(get("/generate/1/progress").first, 404);
}

TEST_F(Served, BoundsAndPoints) {
    load_example30();
    auto [status, body] = get("/frontier/bounds");
    EXPECT_EQ(status, 200);
    EXPECT_EQ(body["size"], 30);
    EXPECT_EQ(body["frontier"], Json::parse("[[9.0,100.0],[5.0,95.0],[1.0,96.0]]"));
    EXPECT_EQ(body["labels"], Json::parse(R"(["obj1","obj2","obj3"])"));
    EXPECT_EQ(body["spread"][1]["median"], 57.5);

    std::tie(status, body) = get("/frontier/point/0");
    EXPECT_EQ(status, 200);
    const auto first = io::load_archive(data("example30.archive")).archive.point(0);
    EXPECT_EQ(body["point"].get<std::vector<double>>(), first);
    EXPECT_EQ(body["frontier"].size(), 3u);
    EXPECT_EQ(get("/frontier/point/30").first, 404);
    EXPECT_EQ(get("/frontier/point/abc").first, 400);

    std::tie(status, body) = get("/frontier/points?page=2&page_size=7");
    EXPECT_EQ(status, 200);
    ASSERT_EQ(body["points"].size(), 7u);
    EXPECT_EQ(body["points"][0]["index"], 14);
    EXPECT_EQ(get("/frontier/points?page_size=0").first, 400);
}

TEST_F(Served, RangeQueryGolden) {
    load_example30();
    const auto [status, body] = post("/query/range", R"({"low":[45,20,56],"high":[100,95,96]})");
    ASSERT_EQ(status, 200);
    EXPECT_EQ(body["total"], 4);
    EXPECT_NEAR(body["coverage_percent"].get<double>(), 100.0 * 4 / 30, 1e-12);
    std::vector<Point> got;
    for (const auto& c : body["candidates"]) got.push_back(c["point"].get<Point>());
    EXPECT_EQ(got, (std::vector<Point>{{100, 89, 82}, {68, 26, 96}, {68, 93, 76}, {80, 79, 78}}));
    EXPECT_EQ(body["achievable"], Json::parse("[[68.0,100.0],[26.0,93.0],[76.0,96.0]]"));
    EXPECT_EQ(body["lines"], Json::parse(R"(["[9, [45, [68, 100]]]","[5, [20, [26, 93], 95]]","[1, [56, [76, 96]]]"])"));
    EXPECT_EQ(body["best"]["point"].get<Point>(), (Point{100, 89, 82}));

    // The answer is the shared document, byte for byte.
    const auto a = io::load_archive(data("example30.archive")).archive;
    const auto doc = io::render(io::range_document(
        a, casemix::analytics::range_query_ext(a, casemix::Hypercube({{45, 100}, {20, 95}, {56, 96}}))));
    const auto served = client->Post("/query/range", R"({"low":[45,20,56],"high":[100,95,96]})", "application/json")->body;
    EXPECT_EQ(served, doc);
    // The command-line tool checks its output against the same file.
    EXPECT_EQ(served, io::read_text_file(CASEMIX_GOLDEN_DIR "/example30_range.json"));
    EXPECT_EQ(client->Post("/query/goal", R"({"point":[25,5,87]})", "application/json")->body,
              io::read_text_file(CASEMIX_GOLDEN_DIR "/example30_goal.json"));
}

TEST_F(Served, RangeQueryPaginates) {
    load_example30();
    auto [status, body] = post("/query/range", R"({"low":[0,0,0],"high":[100,100,100]})");
    EXPECT_EQ(body["total"], 30);
    EXPECT_EQ(body["page_size"], 100);
    EXPECT_EQ(body["candidates"].size(), 30u);
    std::tie(status, body) = post("/query/range?page=1&page_size=8", R"({"low":[0,0,0],"high":[100,100,100]})");
    EXPECT_EQ(body["candidates"].size(), 8u);
    EXPECT_EQ(body["candidates"][0]["index"], 8);
    std::tie(status, body) = post("/query/range", R"({"low":[0,0,0],"high":[100,100,100],"page":3,"page_size":8})");
    EXPECT_EQ(body["candidates"].size(), 6u);
}

TEST_F(Served, RangeQueryErrors) {
    load_example30();
    EXPECT_EQ(post("/query/range", "{not json").first, 400);
    EXPECT_EQ(post("/query/range", R"({"low":[1,2,3]})").first, 400);
    EXPECT_EQ(post("/query/range", R"({"low":[1,2,"x"],"high":[4,5,6]})").first, 400);
    EXPECT_EQ(post("/query/range", R"({"low":[1,2],"high":[4,5]})").first, 422);
    EXPECT_EQ(post("/query/range", R"({"low":[5,2,3],"high":[4,5,6]})").first, 400);
    const auto [status, body] = post("/query/range", R"({"low":[1,2],"high":[4,5]})");
    EXPECT_EQ(body["status"], 422);
    EXPECT_TRUE(body["error"].is_string());
}

TEST_F(Served, GoalQueries) {
    load_example30();
    auto [status, body] = post("/query/goal", R"({"point":[25,5,87]})");
    ASSERT_EQ(status, 200);
    EXPECT_TRUE(body["dominated"].get<bool>());
    EXPECT_EQ(body["verdict"], "inferior");
    EXPECT_GE(body["alternative_count"].get<int>(), 1);
    EXPECT_TRUE(body["closest"].is_null());

    std::tie(status, body) = post("/query/goal", R"({"point":[101,96,97]})");
    ASSERT_EQ(status, 200);
    EXPECT_FALSE(body["dominated"].get<bool>());
    // Brute-force nearest member of the fixture.
    const auto a = io::load_archive(data("example30.archive")).archive;
    const Point goal{101, 96, 97};
    std::size_t best = 0;
    for (std::size_t i = 1; i < a.size(); ++i)
        if (casemix::squared_distance(a.point(i), goal) < casemix::squared_distance(a.point(best), goal)) best = i;
    EXPECT_EQ(body["closest"]["index"], best);
    EXPECT_EQ(body["change"].size(), 3u);
    EXPECT_EQ(post("/query/goal", R"({"point":[1,2]})").first, 422);
    EXPECT_EQ(post("/query/goal", R"({"pt":[1,2,3]})").first, 400);
}

TEST_F(Served, Uniformity) {
    load_example30();
    const auto [status, body] = get("/frontier/uniformity");
    ASSERT_EQ(status, 200);
    EXPECT_NEAR(body["dimensions"][0]["mean"].get<double>(), 91.0 / 29.0, 1e-12);
}

TEST_F(Served, CorsHeaders) {
    load_example30();
    const auto res = client->Get("/frontier/bounds");
    ASSERT_TRUE(res);
    EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "*");
    const auto pre = client->Options("/query/range");
    ASSERT_TRUE(pre);
    EXPECT_EQ(pre->status, 204);
    EXPECT_NE(pre->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);
}

TEST_F(Served, GenerationJobLifecycle) {
    service->set_instance(io::load_instance(data("shared_pair.json")));
    EXPECT_EQ(post("/generate", R"({"points":0})").first, 400);
    EXPECT_EQ(post("/generate", "[").first, 400);
    auto [status, body] = post("/generate", R"({"points":60,"threads":2,"stage":10,"seed":4})");
    ASSERT_EQ(status, 202);
    const auto id = body["job"].get<std::uint64_t>();
    ASSERT_TRUE(service->wait_for_job(id));
    std::tie(status, body) = get("/generate/" + std::to_string(id) + "/progress");
    EXPECT_EQ(status, 200);
    EXPECT_EQ(body["state"], "finished");
    EXPECT_EQ(body["stage"], 3);
    EXPECT_EQ(body["stages"], 3);
    EXPECT_EQ(body["evaluated"], 60);
    EXPECT_EQ(body["report"]["generated"], body["points"]);

    std::tie(status, body) = get("/frontier/bounds");
    EXPECT_EQ(status, 200);
    EXPECT_EQ(body["labels"], Json::parse(R"(["G1","G2"])"));
    std::tie(status, body) = post("/query/range", R"({"low":[0,0],"high":[50,50]})");
    EXPECT_GT(body["total"].get<int>(), 0);
    for (const auto& c : body["candidates"]) EXPECT_NEAR(c["point"][0].get<double>() + c["point"][1].get<double>(), 50.0, 1e-6);
    EXPECT_EQ(get("/generate/99/progress").first, 404);
}

TEST_F(Served, SecondJobWhileRunningIs409AndReadsSeeSnapshots) {
    service->set_instance(io::load_instance(data("case_study.json")));
    auto [status, body] = post("/generate", R"({"points":400,"threads":1,"stage":20,"seed":1})");
    ASSERT_EQ(status, 202);
    const auto id = body["job"].get<std::uint64_t>();
    EXPECT_EQ(post("/generate", R"({"points":10})").first, 409);

    // Poll while the job runs: every read is a whole stage.
    std::size_t last = 0;
    bool saw_partial = false;
    for (int i = 0; i < 2000; ++i) {
        const auto [ps, progress] = get("/generate/" + std::to_string(id) + "/progress");
        const auto [bs, bounds] = get("/frontier/bounds");
        if (bs == 200) {
            const auto size = bounds["size"].get<std::size_t>();
            EXPECT_GE(size, last);
            last = size;
            if (progress["state"] == "running" && size > 0 && size < 400) saw_partial = true;
        }
        if (progress["state"] != "running") break;
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    service->wait_for_job(id);
    EXPECT_TRUE(saw_partial);
    std::tie(status, body) = get("/generate/" + std::to_string(id) + "/progress");
    EXPECT_EQ(body["state"], "finished");
    EXPECT_EQ(get("/frontier/bounds").second["size"], body["points"]);
    EXPECT_EQ(post("/generate", R"({"points":10,"stage":10})").first, 202);
}

}  // namespace
