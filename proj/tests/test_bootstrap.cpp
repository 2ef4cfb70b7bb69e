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

#include "privminer/bootstrap.hpp"
#include "privminer/error.hpp"
#include "privminer/synth.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace privminer;

namespace {

struct Fixture {
    BootstrapFixture raw;
    std::vector<TokenStream> docs;
    std::vector<int> truth;
};

Fixture fixture()
{
    Fixture f{make_bootstrap_fixture(3), {}, {}};
    f.docs = tokenize_corpus(f.raw.reviews, default_pipeline_tokenizer());
    for (const auto& [id, label] : f.raw.labels) f.truth.push_back(label);
    return f;
}

KeywordJudge approve_only(std::set<std::string> words)
{
    return [words](const KeywordCandidate& c, int) { return words.count(c.keyword) > 0; };
}

} // namespace

TEST(Bootstrap, EmptySeedRejected)
{
    EXPECT_THROW(BootstrapRun({{"a", {"x"}}}, {}, {}), DataError);
}

TEST(Bootstrap, SeedMatchingNothingStops)
{
    const auto h = bootstrap_baseline({{"a", {"x", "y"}}, {"b", {"z"}}}, {1, 0}, {"absent"}, approve_only({}));
    ASSERT_EQ(h.size(), 1u);
    EXPECT_EQ(h[0].positives, 0u);
    EXPECT_TRUE(h[0].candidates.empty());
}

TEST(Bootstrap, FullCoverageAtFirstIteration)
{
    const std::vector<TokenStream> docs{{"a", {"privacy", "data"}}, {"b", {"privacy", "leak"}}, {"c", {"game", "fun"}}};
    const auto h = bootstrap_baseline(docs, {1, 1, 0}, {"privacy"}, approve_only({}));
    ASSERT_FALSE(h.empty());
    EXPECT_DOUBLE_EQ(h[0].report->f1, 1.0);
}

TEST(Bootstrap, RiseThenFallOnPlantedCorpus)
{
    const Fixture f = fixture();
    const auto h = bootstrap_baseline(f.docs, f.truth, {f.raw.seed},
                                      approve_only({f.raw.bridge, f.raw.poison}));
    ASSERT_GE(h.size(), 3u);
    EXPECT_LT(h[0].report->f1, h[1].report->f1);
    EXPECT_GT(h[1].report->f1, h[2].report->f1);
    EXPECT_EQ(h[0].approved, std::vector<std::string>{f.raw.bridge});
    EXPECT_EQ(h[1].approved, std::vector<std::string>{f.raw.poison});
    // Keyword sets only grow, so positives never shrink.
    for (std::size_t i = 1; i < h.size(); ++i) EXPECT_GE(h[i].positives, h[i - 1].positives);
}

TEST(Bootstrap, CandidatesExcludeKnownWordsAndCarrySamples)
{
    const Fixture f = fixture();
    BootstrapRun run(f.docs, f.truth, {f.raw.seed});
    const auto pending = run.pending();
    ASSERT_FALSE(pending.empty());
    EXPECT_LE(pending.size(), 5u);
    for (const auto& c : pending) {
        EXPECT_NE(c.keyword, f.raw.seed);
        EXPECT_LE(c.sample_ids.size(), 3u);
        EXPECT_FALSE(c.sample_ids.empty());
    }
    for (std::size_t i = 1; i < pending.size(); ++i) EXPECT_LE(pending[i].score, pending[i - 1].score);
    EXPECT_THROW(run.decide("not-a-candidate", true), NotFoundError);
}

TEST(Bootstrap, RejectAllTerminates)
{
    const Fixture f = fixture();
    BootstrapRun run(f.docs, f.truth, {f.raw.seed});
    for (const auto& c : run.pending()) run.decide(c.keyword, false);
    EXPECT_TRUE(run.finished());
    EXPECT_EQ(run.history().size(), 1u);
    EXPECT_TRUE(run.pending().empty());
}

TEST(Bootstrap, MaxItersAndDeterminism)
{
    const Fixture f = fixture();
    BootstrapConfig cfg;
    cfg.max_iters = 2;
    const auto approve_all = [](const KeywordCandidate&, int) { return true; };
    const auto a = bootstrap_baseline(f.docs, f.truth, {f.raw.seed}, approve_all, cfg);
    EXPECT_EQ(a.size(), 2u);
    EXPECT_TRUE(a.back().candidates.empty());
    const auto b = bootstrap_baseline(f.docs, f.truth, {f.raw.seed}, approve_all, cfg);
    ASSERT_EQ(a.size(), b.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(to_json(a[i]).dump(), to_json(b[i]).dump());
}
