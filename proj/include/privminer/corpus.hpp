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

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace privminer {

struct Review {
    std::string id;
    std::string app;
    std::string category;
    std::string text;
    std::optional<int> rating;
    std::optional<std::string> date;
    std::optional<std::string> region;

    bool operator==(const Review&) const = default;
};

/// Reviews in input order with unique ids.
class Corpus {
public:
    Corpus() = default;

    /// Throws DataError on a duplicate id or empty text.
    void add(Review review);

    const std::vector<Review>& reviews() const { return reviews_; }
    std::size_t size() const { return reviews_.size(); }
    bool empty() const { return reviews_.empty(); }

    const Review* find(std::string_view id) const;
    const Review& at(std::string_view id) const;

    auto begin() const { return reviews_.begin(); }
    auto end() const { return reviews_.end(); }

private:
    std::vector<Review> reviews_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Reads a JSONL review file. Errors name the offending line.
Corpus load_reviews(const std::filesystem::path& path);

void write_reviews(const Corpus& corpus, const std::filesystem::path& path);

struct PolicyDocument {
    std::string app;
    std::string text;
    std::vector<std::string> excluded_sections;
};

/// Splits a policy on markdown-style `#` headings and drops every section
/// whose heading matches one of the glob `exclusions` (case-insensitive).
PolicyDocument parse_policy(std::string_view text, const std::vector<std::string>& exclusions,
                            std::string app = {});

PolicyDocument load_policy(const std::filesystem::path& path,
                           const std::vector<std::string>& exclusions, std::string app = {});

struct TokenStream {
    std::string doc_id;
    std::vector<std::string> tokens;
};

struct TokenizeConfig {
    std::size_t min_len = 2;
    bool remove_stopwords = false;
    std::unordered_set<std::string> stopwords;
};

/// Lowercases, splits on non-alphanumeric code points and drops short
/// tokens (length counted in code points) and, optionally, stopwords.
TokenStream tokenize(std::string_view text, const TokenizeConfig& config = {},
                     std::string doc_id = {});

std::vector<TokenStream> tokenize_corpus(const Corpus& corpus, const TokenizeConfig& config);

/// One term per line; blank lines and lines starting with '#' are ignored.
std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path);

/// The English list shipped in data/. PRIVMINER_STOPWORDS overrides the path.
std::filesystem::path default_stopwords_path();

/// Tokenizer settings used by the pipeline: min length 2 plus the shipped
/// stopword list.
TokenizeConfig default_pipeline_tokenizer();

class Vocabulary {
public:
    Vocabulary() = default;
    /// Terms are sorted and deduplicated.
    explicit Vocabulary(std::vector<std::string> terms);

    const std::vector<std::string>& terms() const { return terms_; }
    std::size_t size() const { return terms_.size(); }
    bool empty() const { return terms_.empty(); }
    std::optional<std::size_t> index_of(std::string_view term) const;
    bool contains(std::string_view term) const { return index_of(term).has_value(); }

private:
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::size_t> term_to_index_;
};

struct DocumentFrequencies {
    std::size_t num_docs = 0;
    std::unordered_map<std::string, std::size_t> df;

    std::size_t of(std::string_view term) const;
};

DocumentFrequencies document_frequencies(const std::vector<TokenStream>& streams);

/// Terms with document frequency >= min_df, lexicographically ordered.
Vocabulary build_vocabulary(const std::vector<TokenStream>& streams, std::size_t min_df);

} // namespace privminer
