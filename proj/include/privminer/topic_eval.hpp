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

#include "privminer/corpus.hpp"
#include "privminer/jsonl.hpp"

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace privminer {

/// Contiguous token spans of `size`, stepping by one. A nonempty stream
/// shorter than `size` is a single window; an empty stream has none.
std::vector<std::vector<std::string>> sliding_windows(const TokenStream& stream, std::size_t size = 110);

/// Boolean window document frequencies for a fixed set of tracked words.
struct WindowStats {
    std::size_t window_size = 0;
    std::uint64_t total_windows = 0;
    std::vector<std::string> words;
    std::unordered_map<std::string, std::size_t> index;
    std::vector<std::uint64_t> single;
    std::vector<std::uint64_t> pair;   // words.size()^2, symmetric

    std::uint64_t count(const std::string& w) const;
    std::uint64_t count(const std::string& a, const std::string& b) const;
};

WindowStats window_stats(const std::vector<TokenStream>& corpus, const std::vector<std::string>& words,
                         std::size_t window_size = 110);

/// ln((P(a,b)+eps) / (P(a)P(b))) / -ln(P(a,b)+eps), with P(w,w) = P(w).
/// Throws DataError for a word that never occurs in a window.
double npmi(const WindowStats& stats, const std::string& a, const std::string& b, double eps = 1e-12);

struct CoherenceConfig {
    std::size_t window_size = 110;
    double epsilon = 1e-12;
};

struct CoherenceReport {
    std::vector<double> per_topic;   // clamped to [0, 1]
    double mean = 0.0;
    CoherenceConfig config;
};

/// C_V with one-set segmentation: each word's NPMI context vector against
/// the sum of all context vectors in its topic, cosine, mean over words.
/// Throws DataError naming every topic word absent from the corpus.
CoherenceReport cv_coherence(const std::vector<std::vector<std::string>>& topics,
                             const std::vector<TokenStream>& corpus, const CoherenceConfig& config = {});

/// Unique words over total word slots.
double topic_diversity(const std::vector<std::vector<std::string>>& topics);

struct NamedTopic {
    std::string name;
    std::vector<std::string> words;
};

/// JSON array of {"name","words":[...]}.
std::vector<NamedTopic> load_topics(const std::filesystem::path& path);
json topics_to_json(const std::vector<NamedTopic>& topics);

json coherence_report_json(const std::vector<NamedTopic>& topics, const CoherenceReport& report,
                           double diversity);

} // namespace privminer
