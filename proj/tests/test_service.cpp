// Copyright 2026 The privminer Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "privminer/pctd.hpp"
#include "privminer/service.hpp"
#include "privminer/synth.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>
#include <httplib.h>

#include <thread>

using namespace privminer;
using testutil::TempDir;

namespace {

class ServiceTest : public ::testing::Test {
protected:
    void SetUp() override
    {
        service_ = std::make_unique<Service>(ServiceConfig{dir_.path(), std::nullopt});
        service_->mount(server_);
        port_ = server_.bind_to_any_port("127.0.0.1");
        ASSERT_GT(port_, 0);
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
        client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    }

    void TearDown() override
    {
        server_.stop();
        thread_.join();
    }

    std::pair<int, json> get(const std::string& path)
    {
        auto r = client_->Get(path);
        EXPECT_TRUE(r);
        return {r->status, r->body.empty() ? json() : json::parse(r->body)};
    }

    std::pair<int, json> post(const std::string& path, const json& body)
    {
        auto r = client_->Post(path, body.dump(), "application/json");
        EXPECT_TRUE(r);
        return {r->status, r->body.empty() ? json() : json::parse(r->body)};
    }

    TempDir dir_;
    httplib::Server server_;
    std::unique_ptr<Service> service_;
    std::unique_ptr<httplib::Client> client_;
    std::thread thread_;
    int port_ = 0;
};

} // namespace

TEST_F(ServiceTest, Health)
{
    const auto [status, body] = get("/api/health");
    EXPECT_EQ(status, 200);
    EXPECT_EQ(body, json({{"status", "ok"}}));
}

TEST_F(ServiceTest, UnknownSessionIs404)
{
    EXPECT_EQ(get("/api/sessions/missing").first, 404);
    EXPECT_EQ(post("/api/sessions/missing/labels", {{"review_id", "r0"}, {"annotator", "a"}, {"label", 1}}).first,
              404);
    EXPECT_EQ(get("/api/bootstrap/missing/pending-keywords").first, 404);
    EXPECT_EQ(get("/api/runs/missing/topics").first, 404);
}

TEST_F(ServiceTest, LabelingFlowAndKappa)
{
    json candidates = json::array();
    for (int i = 0; i < 10; ++i) candidates.push_back({{"id", "r" + std::to_string(i)}, {"text", "t"}});
    EXPECT_EQ(post("/api/sessions", {{"id", "s1"}, {"candidates", candidates}, {"annotators", {"ann", "bob"}}}).first,
              201);
    EXPECT_EQ(post("/api/sessions", {{"id", "s1"}, {"candidates", {"x"}}, {"annotators", {"a"}}}).first, 400);

    // Table: both 1 x4, first-only x1, second-only x2, both 0 x3.
    const int a[10] = {1, 1, 1, 1, 1, 0, 0, 0, 0, 0};
    const int b[10] = {1, 1, 1, 1, 0, 1, 1, 0, 0, 0};
    for (int i = 0; i < 10; ++i) {
        const std::string id = "r" + std::to_string(i);
        const auto [next_status, next] = get("/api/sessions/s1/next?annotator=ann");
        EXPECT_EQ(next_status, 200);
        EXPECT_EQ(next["candidate"]["id"], id);
        EXPECT_EQ(post("/api/sessions/s1/labels", {{"review_id", id}, {"annotator", "ann"}, {"label", a[i]}}).first,
                  200);
        EXPECT_EQ(post("/api/sessions/s1/labels", {{"review_id", id}, {"annotator", "bob"}, {"label", b[i]}}).first,
                  200);
    }
    // Read-your-write and idempotent repeat.
    const auto [s, state] = get("/api/sessions/s1");
    EXPECT_EQ(state["candidates"][0]["labels"]["ann"], 1);
    const std::size_t events = state["events"];
    post("/api/sessions/s1/labels", {{"review_id", "r0"}, {"annotator", "ann"}, {"label", 1}});
    EXPECT_EQ(get("/api/sessions/s1").second["events"], events);

    const auto [ks, agreement] = get("/api/sessions/s1/agreement");
    EXPECT_EQ(ks, 200);
    const double n = 10, po = 7 / n, pe = (5 / n) * (6 / n) + (5 / n) * (4 / n);
    EXPECT_DOUBLE_EQ(agreement["kappa"].get<double>(), (po - pe) / (1 - pe));
    EXPECT_EQ(agreement["pairs"], 10);

    EXPECT_EQ(get("/api/sessions/s1/next?annotator=zed").first, 400);
    EXPECT_EQ(post("/api/sessions/s1/labels", {{"review_id", "nope"}, {"annotator", "ann"}, {"label", 1}}).first,
              400);
    EXPECT_TRUE(get("/api/sessions/s1/next?annotator=ann").second["candidate"].is_null());
}

TEST_F(ServiceTest, SkipExcludedFromAgreement)
{
    post("/api/sessions", {{"id", "s2"}, {"candidates", {"x", "y"}}, {"annotators", {"a", "b"}}});
    post("/api/sessions/s2/labels", {{"review_id", "x"}, {"annotator", "a"}, {"label", "skip"}});
    post("/api/sessions/s2/labels", {{"review_id", "x"}, {"annotator", "b"}, {"label", 1}});
    const json ag = get("/api/sessions/s2/agreement").second;
    EXPECT_TRUE(ag["kappa"].is_null());
    EXPECT_EQ(ag["pairs"], 0);
}

TEST_F(ServiceTest, BootstrapKeywordFlow)
{
    const BootstrapFixture f = make_bootstrap_fixture(3);
    write_reviews(f.reviews, dir_ / "boot.jsonl");
    write_labels(f.labels, dir_ / "boot_labels.jsonl");
    const auto [cs, created] = post("/api/bootstrap", {{"id", "b1"},
                                                       {"reviews", "boot.jsonl"},
                                                       {"labels", "boot_labels.jsonl"},
                                                       {"seed_keywords", {f.seed}}});
    ASSERT_EQ(cs, 201);

    json pending = get("/api/bootstrap/b1/pending-keywords").second;
    ASSERT_FALSE(pending["pending"].empty());
    EXPECT_FALSE(pending["pending"][0]["samples"][0]["text"].get<std::string>().empty());
    for (const json& p : pending["pending"]) {
        const std::string kw = p["keyword"];
        EXPECT_EQ(post("/api/bootstrap/b1/keywords", {{"keyword", kw}, {"approved", kw == f.bridge}}).first, 200);
    }
    EXPECT_EQ(post("/api/bootstrap/b1/keywords", {{"keyword", f.bridge}, {"approved", true}}).first, 200);
    EXPECT_EQ(post("/api/bootstrap/b1/keywords", {{"keyword", f.bridge}, {"approved", false}}).first, 400);
    EXPECT_EQ(post("/api/bootstrap/b1/keywords", {{"keyword", "never-proposed"}, {"approved", true}}).first, 400);

    const json state = get("/api/bootstrap/b1").second;
    EXPECT_EQ(state["history"].size(), 2u);

    // Decisions survive a restart.
    Service again(ServiceConfig{dir_.path(), std::nullopt});
    httplib::Server other;
    again.mount(other);
    const int port = other.bind_to_any_port("127.0.0.1");
    std::thread t([&] { other.listen_after_bind(); });
    other.wait_until_ready();
    httplib::Client c("127.0.0.1", port);
    const auto r = c.Get("/api/bootstrap/b1");
    ASSERT_TRUE(r);
    EXPECT_EQ(json::parse(r->body)["keywords"], state["keywords"]);
    other.stop();
    t.join();
}

TEST_F(ServiceTest, RunBrowsing)
{
    const std::vector<TokenStream> streams{{"a", {"sell", "data"}}, {"b", {"sell", "money"}},
                                           {"c", {"hacked", "account"}}, {"d", {"hacked", "login"}}};
    EmbeddingSet emb(2, "t");
    emb.insert({"a", {1, 0.1}, false});
    emb.insert({"b", {1, 0.2}, false});
    emb.insert({"c", {0.1, 1}, false});
    emb.insert({"d", {0.2, 1}, false});
    PctdConfig cfg;
    cfg.reduction = ReductionMethod::none;
    write_pctd_outputs(run_pctd(streams, emb, 2, 1, cfg), "run1", dir_ / "runs" / "run1");

    const json runs = get("/api/runs").second;
    ASSERT_EQ(runs["runs"].size(), 1u);
    EXPECT_EQ(runs["runs"][0]["K"], 2);
    EXPECT_EQ(get("/api/runs/run1/topics").second["clusters"].size(), 2u);
    const json reviews = get("/api/runs/run1/clusters/0/reviews").second;
    EXPECT_EQ(reviews["reviews"].size(), 2u);
    EXPECT_EQ(get("/api/runs/run1/clusters/9/reviews").first, 404);
    EXPECT_EQ(get("/api/runs/run1/clusters/x/reviews").first, 400);
    const json proj = get("/api/runs/run1/projection").second;
    EXPECT_EQ(proj["points"].size(), 4u);
    EXPECT_FALSE(proj["points"][0]["cluster"].is_null());
}
