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

#include "privminer/retrieval.hpp"

#include "privminer/error.hpp"
#include "privminer/jsonl.hpp"
#include "privminer/kernels.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace privminer {

void RelevanceJudgments::set(std::string doc_id, bool relevant)
{
    auto [it, inserted] = labels_.try_emplace(std::move(doc_id), relevant);
    if (!inserted) {
        if (it->second) {
            --total_relevant_;
        }
        it->second = relevant;
    }
    if (relevant) {
        ++total_relevant_;
    }
}

bool RelevanceJudgments::is_relevant(std::string_view doc_id) const
{
    auto it = labels_.find(std::string(doc_id));
    if (it == labels_.end()) {
        throw DataError("no relevance judgment for '" + std::string(doc_id) + "'");
    }
    return it->second;
}

bool RelevanceJudgments::contains(std::string_view doc_id) const
{
    return labels_.contains(std::string(doc_id));
}

RelevanceJudgments load_judgments(const std::filesystem::path& path)
{
    RelevanceJudgments j;
    for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
            !obj.contains("label") || !obj["label"].is_number_integer()) {
            throw DataError(path.string() + ": line " + std::to_string(line) +
                            ": expected {\"id\",\"label\"}");
        }
        const int label = obj["label"].get<int>();
        if (label != 0 && label != 1) {
            throw DataError(path.string() + ": line " + std::to_string(line) + ": label must be 0 or 1");
        }
        j.set(obj["id"].get<std::string>(), label == 1);
    });
    return j;
}

RankedList rank_reviews(const EmbeddingVector& query, const EmbeddingSet& reviews)
{
    if (query.values.size() != reviews.dim()) {
        throw DataError("query dimension " + std::to_string(query.values.size()) +
                        " does not match review dimension " + std::to_string(reviews.dim()));
    }
    if (l2_norm(query.values) == 0.0) {
        throw DataError("query vector is zero");
    }
    RankedList out;
    out.query_id = query.doc_id;

    std::vector<const EmbeddingVector*> usable;
    usable.reserve(reviews.size());
    for (const EmbeddingVector& v : reviews) {
        if (v.degenerate || l2_norm(v.values) == 0.0) {
            out.skipped_degenerate.push_back(v.doc_id);
        } else {
            usable.push_back(&v);
        }
    }
    RowMatrix docs(static_cast<Eigen::Index>(usable.size()), static_cast<Eigen::Index>(reviews.dim()));
    for (std::size_t i = 0; i < usable.size(); ++i) {
        std::copy(usable[i]->values.begin(), usable[i]->values.end(),
                  docs.data() + i * reviews.dim());
    }
    std::vector<double> scores(usable.size());
    kernels::cosine_scores(query.values, docs, scores);

    out.entries.reserve(usable.size());
    for (std::size_t i = 0; i < usable.size(); ++i) {
        out.entries.push_back({usable[i]->doc_id, scores[i]});
    }
    std::sort(out.entries.begin(), out.entries.end(), [](const RankedEntry& a, const RankedEntry& b) {
        if (a.score != b.score) {
            return a.score > b.score;
        }
        return a.doc_id < b.doc_id;
    });
    return out;
}

RankedList top_m(const RankedList& list, std::size_t m)
{
    if (m == 0) {
        throw UsageError("top-m must be at least 1");
    }
    RankedList out;
    out.query_id = list.query_id;
    out.skipped_degenerate = list.skipped_degenerate;
    const std::size_t n = std::min(m, list.entries.size());
    out.entries.assign(list.entries.begin(), list.entries.begin() + static_cast<std::ptrdiff_t>(n));
    return out;
}

std::vector<bool> relevance_pattern(const RankedList& list, const RelevanceJudgments& judgments)
{
    std::vector<bool> pattern;
    pattern.reserve(list.entries.size());
    for (const RankedEntry& e : list.entries) {
        pattern.push_back(judgments.is_relevant(e.doc_id));
    }
    return pattern;
}

namespace {

void check_k(const std::vector<bool>& pattern, std::size_t k)
{
    if (k < 1 || k > pattern.size()) {
        throw DataError("k=" + std::to_string(k) + " out of range [1, " +
                        std::to_string(pattern.size()) + "]");
    }
}

void check_total(std::size_t total_relevant)
{
    if (total_relevant == 0) {
        throw DataError("recall undefined: no relevant documents");
    }
}

std::size_t hits(const std::vector<bool>& pattern, std::size_t k)
{
    return static_cast<std::size_t>(std::count(pattern.begin(), pattern.begin() + static_cast<std::ptrdiff_t>(k), true));
}

double harmonic(double p, double r) { return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r); }

} // namespace

double precision_at_k(const std::vector<bool>& pattern, std::size_t k)
{
    check_k(pattern, k);
    return static_cast<double>(hits(pattern, k)) / static_cast<double>(k);
}

double recall_at_k(const std::vector<bool>& pattern, std::size_t k, std::size_t total_relevant)
{
    check_total(total_relevant);
    check_k(pattern, k);
    return static_cast<double>(hits(pattern, k)) / static_cast<double>(total_relevant);
}

double f1_at_k(const std::vector<bool>& pattern, std::size_t k, std::size_t total_relevant)
{
    return harmonic(precision_at_k(pattern, k), recall_at_k(pattern, k, total_relevant));
}

double average_precision(const std::vector<bool>& pattern, std::size_t total_relevant, std::size_t k)
{
    check_total(total_relevant);
    const std::size_t n = k == 0 ? pattern.size() : std::min(k, pattern.size());
    double sum = 0.0;
    std::size_t seen = 0;
    for (std::size_t r = 0; r < n; ++r) {
        if (pattern[r]) {
            ++seen;
            sum += static_cast<double>(seen) / static_cast<double>(r + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

double precision_at_k(const RankedList& list, const RelevanceJudgments& judgments, std::size_t k)
{
    return precision_at_k(relevance_pattern(list, judgments), k);
}

double recall_at_k(const RankedList& list, const RelevanceJudgments& judgments, std::size_t k)
{
    return recall_at_k(relevance_pattern(list, judgments), k, judgments.total_relevant());
}

double f1_at_k(const RankedList& list, const RelevanceJudgments& judgments, std::size_t k)
{
    return f1_at_k(relevance_pattern(list, judgments), k, judgments.total_relevant());
}

double average_precision(const RankedList& list, const RelevanceJudgments& judgments, std::size_t k)
{
    return average_precision(relevance_pattern(list, judgments), judgments.total_relevant(), k);
}

F1Curve f1_curve(const std::vector<bool>& pattern, std::size_t total_relevant, std::size_t k_max)
{
    check_total(total_relevant);
    check_k(pattern, k_max);
    F1Curve curve;
    curve.points.reserve(k_max);
    std::size_t seen = 0;
    for (std::size_t k = 1; k <= k_max; ++k) {
        if (pattern[k - 1]) {
            ++seen;
        }
        const double p = static_cast<double>(seen) / static_cast<double>(k);
        const double r = static_cast<double>(seen) / static_cast<double>(total_relevant);
        const double f1 = harmonic(p, r);
        curve.points.emplace_back(k, f1);
        if (f1 > curve.best_f1 || curve.best_k == 0) {
            curve.best_f1 = f1;
            curve.best_k = k;
        }
    }
    return curve;
}

F1Curve f1_curve(const RankedList& list, const RelevanceJudgments& judgments, std::size_t k_max)
{
    return f1_curve(relevance_pattern(list, judgments), judgments.total_relevant(), k_max);
}

std::string ranked_list_csv(const RankedList& list)
{
    std::string out = "rank,doc_id,score\n";
    char buf[64];
    for (std::size_t i = 0; i < list.entries.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.6f", list.entries[i].score);
        out += std::to_string(i + 1) + ',' + list.entries[i].doc_id + ',' + buf + '\n';
    }
    return out;
}

void write_ranked_csv(const RankedList& list, const std::filesystem::path& path)
{
    write_file(path, ranked_list_csv(list));
}

RankedList load_ranked_csv(const std::filesystem::path& path)
{
    std::istringstream in(read_file(path));
    std::string line;
    RankedList list;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line_no == 1 || line.empty()) {
            continue;
        }
        const auto c1 = line.find(',');
        const auto c2 = line.rfind(',');
        if (c1 == std::string::npos || c1 == c2) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) +
                            ": expected rank,doc_id,score");
        }
        try {
            list.entries.push_back({line.substr(c1 + 1, c2 - c1 - 1), std::stod(line.substr(c2 + 1))});
        } catch (const std::exception&) {
            throw DataError(path.string() + ": line " + std::to_string(line_no) + ": bad score");
        }
    }
    return list;
}

} // namespace privminer
