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

#include "privminer/corpus.hpp"
#include "privminer/error.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

using namespace privminer;
using testutil::TempDir;

namespace {

std::string review_line(const std::string& id, const std::string& text)
{
    return json{{"id", id}, {"app", "A"}, {"category", "social"}, {"text", text}}.dump() + "\n";
}

} // namespace

TEST(LoadReviews, ReadsValidLines)
{
    TempDir dir;
    const auto path = dir.write("r.jsonl", review_line("r1", "one") + review_line("r2", "two") + "\n" +
                                               review_line("r3", "three"));
    const Corpus c = load_reviews(path);
    ASSERT_EQ(c.size(), 3u);
    EXPECT_EQ(c.at("r2").text, "two");
    EXPECT_FALSE(c.at("r2").rating.has_value());
}

TEST(LoadReviews, DuplicateIdNamesIdAndLine)
{
    TempDir dir;
    const auto path = dir.write("r.jsonl", review_line("r0", "a") + review_line("r1", "b") + review_line("r2", "c") +
                                               review_line("r3", "d") + review_line("r1", "e"));
    try {
        load_reviews(path);
        FAIL() << "expected DataError";
    } catch (const DataError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("'r1'"), std::string::npos) << msg;
        EXPECT_NE(msg.find("line 5"), std::string::npos) << msg;
    }
}

TEST(LoadReviews, EmptyFileIsEmptyCorpus)
{
    TempDir dir;
    EXPECT_TRUE(load_reviews(dir.write("r.jsonl", "")).empty());
}

TEST(LoadReviews, MalformedLineNamesLine)
{
    TempDir dir;
    const auto path = dir.write("r.jsonl", review_line("r1", "a") + "{not json\n");
    try {
        load_reviews(path);
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(LoadReviews, RejectsOutOfRangeRating)
{
    TempDir dir;
    const auto path = dir.write("r.jsonl", R"({"id":"r1","app":"A","text":"x","rating":7})" "\n");
    EXPECT_THROW(load_reviews(path), DataError);
}

TEST(LoadReviews, WriteRoundTrip)
{
    TempDir dir;
    Corpus c;
    c.add({"r1", "A", "social", "hello there", 4, "2022-01-01", std::nullopt});
    c.add({"r2", "B", "finance", "second", std::nullopt, std::nullopt, "us"});
    write_reviews(c, dir / "out.jsonl");
    const Corpus back = load_reviews(dir / "out.jsonl");
    EXPECT_EQ(back.reviews(), c.reviews());
}

TEST(Policy, ExcludesMatchingSections)
{
    const std::string text = "# Information We Collect\nwe collect data\n# Contact Us\nmail us\n";
    const PolicyDocument p = parse_policy(text, {"Contact*"});
    EXPECT_NE(p.text.find("collect data"), std::string::npos);
    EXPECT_EQ(p.text.find("mail us"), std::string::npos);
    ASSERT_EQ(p.excluded_sections.size(), 1u);
}

TEST(Policy, NoExclusionsKeepsTextUnchanged)
{
    const std::string text = "Preamble\n# A\nalpha\r\n# B\nbeta";
    EXPECT_EQ(parse_policy(text, {}).text, text);
}

TEST(Policy, FullyExcludedIsAnError)
{
    try {
        parse_policy("# Contact\nx\n# Changes\ny\n", {"contact*", "chan*"});
        FAIL();
    } catch (const DataError& e) {
        EXPECT_NE(std::string(e.what()).find("policy fully excluded"), std::string::npos);
    }
}

TEST(Tokenize, StopwordsAndCase)
{
    TokenizeConfig cfg;
    cfg.remove_stopwords = true;
    cfg.stopwords = {"my"};
    EXPECT_EQ(tokenize("Sell my DATA!", cfg).tokens, (std::vector<std::string>{"sell", "data"}));
}

TEST(Tokenize, MinLengthAndBoundaries)
{
    EXPECT_TRUE(tokenize("a b").tokens.empty());
    EXPECT_EQ(tokenize("privacy-policy").tokens, (std::vector<std::string>{"privacy", "policy"}));
    EXPECT_TRUE(tokenize("").tokens.empty());
}

TEST(Tokenize, NonAsciiLetters)
{
    EXPECT_EQ(tokenize("Café ÜBER Привет").tokens, (std::vector<std::string>{"café", "über", "привет"}));
    // Invalid UTF-8 acts as a separator.
    EXPECT_EQ(tokenize("ab\xff" "cd").tokens, (std::vector<std::string>{"ab", "cd"}));
    EXPECT_EQ(tokenize("ab\xe2").tokens, (std::vector<std::string>{"ab"}));
}

TEST(Tokenize, PipelineConfigDropsShippedStopwords)
{
    const TokenStream s = tokenize("They sold my data to the brokers", default_pipeline_tokenizer());
    EXPECT_EQ(s.tokens, (std::vector<std::string>{"sold", "data", "brokers"}));
}

TEST(Vocabulary, MinDf)
{
    const std::vector<TokenStream> streams = {{"d1", {"a", "b"}}, {"d2", {"b", "c"}}};
    EXPECT_EQ(build_vocabulary(streams, 2).terms(), (std::vector<std::string>{"b"}));
    EXPECT_EQ(build_vocabulary(streams, 1).terms(), (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_TRUE(build_vocabulary({}, 1).empty());
    EXPECT_THROW(build_vocabulary(streams, 0), UsageError);
}

TEST(Vocabulary, DocumentFrequencyCountsDocumentsNotTokens)
{
    const DocumentFrequencies df = document_frequencies({{"d1", {"a", "a", "b"}}, {"d2", {"a"}}});
    EXPECT_EQ(df.num_docs, 2u);
    EXPECT_EQ(df.of("a"), 2u);
    EXPECT_EQ(df.of("b"), 1u);
    EXPECT_EQ(df.of("zzz"), 0u);
}
