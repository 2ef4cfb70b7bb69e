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

#include "privminer/embedding.hpp"

#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

namespace privminer {

struct RankedEntry {
    std::string doc_id;
    double score = 0.0;

    bool operator==(const RankedEntry&) const = default;
};

/// Documents by descending score, ties by ascending doc_id.
struct RankedList {
    std::string query_id;
    std::vector<RankedEntry> entries;
    /// Documents left out because their vector is zero or flagged degenerate.
    std::vector<std::string> skipped_degenerate;
};

class RelevanceJudgments {
public:
    void set(std::string doc_id, bool relevant);
    /// Throws DataError if the document has no judgment.
    bool is_relevant(std::string_view doc_id) const;
    bool contains(std::string_view doc_id) const;
    std::size_t total_relevant() const { return total_relevant_; }
    std::size_t size() const { return labels_.size(); }

private:
    std::unordered_map<std::string, bool> labels_;
    std::size_t total_relevant_ = 0;
};

/// JSONL of {"id","label":0|1}.
RelevanceJudgments load_judgments(const std::filesystem::path& path);

/// Ranks every non-degenerate review by cosine similarity to the query.
RankedList rank_reviews(const EmbeddingVector& query, const EmbeddingSet& reviews);

RankedList top_m(const RankedList& list, std::size_t m);

/// rel(r) for each rank of the list.
std::vector<bool> relevance_pattern(const RankedList& list, const RelevanceJudgments& judgments);

// Metrics over a relevance pattern; `total_relevant` is the number of
// relevant documents in the judgments, retrieved or not.
double precision_at_k(const std::vector<bool>& pattern, std::size_t k);
double recall_at_k(const std::vector<bool>& pattern, std::size_t k, std::size_t total_relevant);
double f1_at_k(const std::vector<bool>& pattern, std::size_t k, std::size_t total_relevant);
/// Sum over the first `k` ranks (all ranks when k == 0) of P(r) * rel(r),
/// divided by total_relevant.
double average_precision(const std::vector<bool>& pattern, std::size_t total_relevant,
                         std::size_t k = 0);

double precision_at_k(const RankedList& list, const RelevanceJudgments& judgments, std::size_t k);
double recall_at_k(const RankedList& list, const RelevanceJudgments& judgments, std::size_t k);
double f1_at_k(const RankedList& list, const RelevanceJudgments& judgments, std::size_t k);
double average_precision(const RankedList& list, const RelevanceJudgments& judgments,
                         std::size_t k = 0);

struct F1Curve {
    std::vector<std::pair<std::size_t, double>> points;
    std::size_t best_k = 0;
    double best_f1 = 0.0;
};

F1Curve f1_curve(const std::vector<bool>& pattern, std::size_t total_relevant, std::size_t k_max);
F1Curve f1_curve(const RankedList& list, const RelevanceJudgments& judgments, std::size_t k_max);

/// CSV with header `rank,doc_id,score`, score printed with 6 decimals.
std::string ranked_list_csv(const RankedList& list);
void write_ranked_csv(const RankedList& list, const std::filesystem::path& path);
RankedList load_ranked_csv(const std::filesystem::path& path);

} // namespace privminer
