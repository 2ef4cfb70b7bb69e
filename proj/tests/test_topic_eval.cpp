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

#include "privminer/error.hpp"
#include "privminer/random.hpp"
#include "privminer/topic_eval.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

using namespace privminer;
using testutil::TempDir;

namespace {

TokenStream ts(const std::string& id, const std::string& text)
{
    TokenStream s{id, {}};
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find(' ', pos), text.size());
        if (end > pos) s.tokens.push_back(text.substr(pos, end - pos));
        pos = end + 1;
    }
    return s;
}

// Step-by-step C_V written directly from window sets, sharing no code with
// the library.
struct Oracle {
    std::vector<std::set<std::string>> windows;
    double eps = 1e-12;

    Oracle(const std::vector<TokenStream>& corpus, std::size_t size)
    {
        for (const auto& d : corpus) {
            const auto& t = d.tokens;
            if (t.empty()) continue;
            if (t.size() <= size) {
                windows.emplace_back(t.begin(), t.end());
                continue;
            }
            for (std::size_t i = 0; i + size <= t.size(); ++i) {
                windows.emplace_back(t.begin() + static_cast<std::ptrdiff_t>(i),
                                     t.begin() + static_cast<std::ptrdiff_t>(i + size));
            }
        }
    }

    double p(const std::string& a, const std::string& b) const
    {
        double n = 0;
        for (const auto& w : windows) n += (w.count(a) && w.count(b)) ? 1 : 0;
        return n / static_cast<double>(windows.size());
    }

    double npmi(const std::string& a, const std::string& b) const
    {
        const double pab = p(a, b) + eps;
        return std::log(pab / (p(a, a) * p(b, b))) / -std::log(pab);
    }

    double topic(const std::vector<std::string>& words) const
    {
        const std::size_t n = words.size();
        std::vector<std::vector<double>> v(n, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) v[i][j] = npmi(words[i], words[j]);
        std::vector<double> sum(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) sum[j] += v[i][j];
        double total = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double d = 0, a = 0, b = 0;
            for (std::size_t j = 0; j < n; ++j) {
                d += v[i][j] * sum[j];
                a += v[i][j] * v[i][j];
                b += sum[j] * sum[j];
            }
            total += (a == 0 || b == 0) ? 0.0 : d / std::sqrt(a * b);
        }
        return std::clamp(total / static_cast<double>(n), 0.0, 1.0);
    }
};

// 40 tokens over two loose themes.
std::vector<TokenStream> corpus_forty()
{
    return {ts("d1", "data sell share data third party sell money"),
            ts("d2", "account hacked password stolen account login hacked again"),
            ts("d3", "sell data party share ads money tracking"),
            ts("d4", "password hacked login stolen email account reset password"),
            ts("d5", "tracking ads data sell share location location tracking share")};
}

std::vector<TokenStream> corpus_long()
{
    Rng rng(31);
    const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f", "g"};
    std::vector<TokenStream> out;
    for (int i = 0; i < 6; ++i) {
        TokenStream s{"d" + std::to_string(i), {}};
        s.tokens.resize(5 + rng.below(20));
        for (auto& t : s.tokens) t = vocab[rng.below(vocab.size())];
        out.push_back(s);
    }
    return out;
}

} // namespace

TEST(Windows, Examples)
{
    EXPECT_EQ(sliding_windows(ts("x", "a b c d e"), 2).size(), 4u);
    EXPECT_EQ(sliding_windows(ts("x", "a b c"), 110).size(), 1u);
    EXPECT_TRUE(sliding_windows(ts("x", ""), 3).empty());
    const auto w = sliding_windows(ts("x", "a b a"), 2);
    ASSERT_EQ(w.size(), 2u);
    EXPECT_EQ(w[0], (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(w[1], (std::vector<std::string>{"b", "a"}));
    EXPECT_EQ(window_stats({ts("x", "a b a")}, {"a", "b"}, 2).count("a"), 2u);
    EXPECT_THROW(sliding_windows(ts("x", "a"), 0), UsageError);
}

TEST(Npmi, HandEnumeration)
{
    // Windows {a,b}, {a,c}, {b,c}, {a,b}: P(a)=P(b)=3/4, P(a,b)=1/2.
    const std::vector<TokenStream> c{ts("1", "a b"), ts("2", "a c"), ts("3", "b c"), ts("4", "a b")};
    const WindowStats s = window_stats(c, {"a", "b", "c"}, 2);
    EXPECT_EQ(s.total_windows, 4u);
    const double pab = 0.5 + 1e-12;
    const double expected = std::log(pab / (0.75 * 0.75)) / -std::log(pab);
    EXPECT_NEAR(npmi(s, "a", "b"), expected, 1e-15);
    EXPECT_EQ(npmi(s, "a", "b"), npmi(s, "b", "a"));
}

TEST(Npmi, CoOccurringAndIndependent)
{
    // x and y always together in half of the windows.
    const std::vector<TokenStream> c{ts("1", "x y"), ts("2", "z"), ts("3", "x y"), ts("4", "z")};
    EXPECT_NEAR(npmi(window_stats(c, {"x", "y"}, 5), "x", "y"), 1.0, 1e-9);

    // P(a)=P(b)=1/2, P(a,b)=1/4.
    const std::vector<TokenStream> ind{ts("1", "a b"), ts("2", "a"), ts("3", "b"), ts("4", "q")};
    EXPECT_NEAR(npmi(window_stats(ind, {"a", "b"}, 5), "a", "b"), 0.0, 1e-9);
    EXPECT_THROW(npmi(window_stats(ind, {"a", "zz"}, 5), "a", "zz"), DataError);
}

TEST(Npmi, SymmetricOnRandomCorpora)
{
    const auto c = corpus_long();
    const WindowStats s = window_stats(c, {"a", "b", "c", "d", "e", "f", "g"}, 4);
    for (const auto& a : s.words) {
        for (const auto& b : s.words) {
            EXPECT_EQ(npmi(s, a, b), npmi(s, b, a));
            EXPECT_LE(s.count(a, b), std::min(s.count(a), s.count(b)));
        }
    }
}

TEST(Coherence, MatchesOracleOnTwoCorpora)
{
    {
        const auto c = corpus_forty();
        std::size_t tokens = 0;
        for (const auto& d : c) tokens += d.tokens.size();
        ASSERT_EQ(tokens, 40u);
        const std::vector<std::vector<std::string>> topics{{"sell", "data", "share", "money"},
                                                           {"hacked", "password", "account", "tracking"}};
        const Oracle o(c, 3);
        const CoherenceReport r = cv_coherence(topics, c, {3, 1e-12});
        for (std::size_t t = 0; t < topics.size(); ++t) {
            EXPECT_NEAR(r.per_topic[t], o.topic(topics[t]), 1e-9);
        }
        EXPECT_NEAR(r.mean, (r.per_topic[0] + r.per_topic[1]) / 2, 1e-15);
    }
    {
        const auto c = corpus_long();
        const std::vector<std::vector<std::string>> topics{{"a", "b", "c"}, {"d", "e", "f", "g"}, {"a", "g"}};
        const Oracle o(c, 6);
        const CoherenceReport r = cv_coherence(topics, c, {6, 1e-12});
        for (std::size_t t = 0; t < topics.size(); ++t) {
            EXPECT_NEAR(r.per_topic[t], o.topic(topics[t]), 1e-9);
        }
    }
}

TEST(Coherence, PerfectAndSingleWord)
{
    const std::vector<TokenStream> c{ts("1", "p q r"), ts("2", "s t"), ts("3", "p q r"), ts("4", "s")};
    const CoherenceReport r = cv_coherence({{"p", "q", "r"}, {"s"}}, c);
    EXPECT_NEAR(r.per_topic[0], 1.0, 1e-12);
    EXPECT_NEAR(r.per_topic[1], 1.0, 1e-12);
}

TEST(Coherence, PermutationInvariantAndBounded)
{
    const auto c = corpus_forty();
    const CoherenceReport a = cv_coherence({{"sell", "data", "ads"}, {"login", "email", "stolen"}}, c, {4, 1e-12});
    const CoherenceReport b = cv_coherence({{"stolen", "login", "email"}, {"ads", "sell", "data"}}, c, {4, 1e-12});
    EXPECT_NEAR(a.per_topic[0], b.per_topic[1], 1e-12);
    EXPECT_NEAR(a.per_topic[1], b.per_topic[0], 1e-12);
    EXPECT_NEAR(a.mean, b.mean, 1e-12);
    for (double v : a.per_topic) EXPECT_LE(v, 1.0 + 1e-12);
}

TEST(Coherence, MissingWordsNamed)
{
    try {
        cv_coherence({{"sell", "nope"}}, corpus_forty());
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("nope"), std::string::npos);
    }
}

TEST(Diversity, Examples)
{
    EXPECT_DOUBLE_EQ(topic_diversity({{"a", "b"}, {"c", "d"}}), 1.0);
    const std::vector<std::string> ten{"a", "b", "c", "d", "e", "f", "g", "h", "i", "j"};
    EXPECT_DOUBLE_EQ(topic_diversity({ten, ten, ten}), 10.0 / 30.0);

    // 5 x 10 slots, 44 unique.
    std::vector<std::vector<std::string>> topics(5);
    int next = 0;
    for (auto& t : topics)
        for (int i = 0; i < 10; ++i) t.push_back("w" + std::to_string(next++));
    for (int i = 0; i < 6; ++i) topics[4][static_cast<std::size_t>(i)] = topics[0][static_cast<std::size_t>(i)];
    EXPECT_DOUBLE_EQ(topic_diversity(topics), 0.88);
    EXPECT_THROW(topic_diversity({{"a"}, {}}), DataError);
}

TEST(TopicsFile, RoundTrip)
{
    TempDir dir;
    const std::vector<NamedTopic> t{{"selling", {"sell", "data"}}, {"hacks", {"hacked"}}};
    const auto p = dir.write("t.json", topics_to_json(t).dump());
    const auto back = load_topics(p);
    ASSERT_EQ(back.size(), 2u);
    EXPECT_EQ(back[1].name, "hacks");
    EXPECT_EQ(back[0].words, t[0].words);
    EXPECT_THROW(load_topics(dir.write("bad.json", "{}")), DataError);
}
