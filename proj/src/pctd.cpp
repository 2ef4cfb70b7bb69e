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

#include "privminer/error.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <unordered_map>

namespace privminer {

std::vector<std::map<std::string, double>> ctfidf(
    const std::vector<std::vector<const TokenStream*>>& clusters, double log_base)
{
    if (clusters.empty()) {
        throw DataError("c-TF-IDF needs at least one cluster");
    }
    std::vector<std::map<std::string, std::size_t>> tf(clusters.size());
    std::map<std::string, std::size_t> total;
    std::size_t tokens = 0;
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (const TokenStream* s : clusters[c]) {
            for (const std::string& t : s->tokens) {
                ++tf[c][t];
                ++total[t];
                ++tokens;
            }
        }
    }
    if (tokens == 0) {
        throw DataError("c-TF-IDF needs at least one token");
    }
    const double a = static_cast<double>(tokens) / static_cast<double>(clusters.size());
    const double scale = log_base > 0.0 ? std::log(log_base) : 1.0;
    std::vector<std::map<std::string, double>> out(clusters.size());
    for (std::size_t c = 0; c < clusters.size(); ++c) {
        for (const auto& [word, count] : tf[c]) {
            const double idf = std::log(1.0 + a / static_cast<double>(total[word])) / scale;
            out[c][word] = static_cast<double>(count) * idf;
        }
    }
    return out;
}

std::vector<std::vector<ScoredWord>> topic_words(const std::vector<std::map<std::string, double>>& scores,
                                                 std::size_t top_n)
{
    if (top_n < 1) {
        throw UsageError("top_n must be at least 1");
    }
    std::vector<std::vector<ScoredWord>> out;
    out.reserve(scores.size());
    for (const auto& cluster : scores) {
        std::vector<ScoredWord> words;
        words.reserve(cluster.size());
        for (const auto& [w, s] : cluster) {
            words.push_back({w, s});
        }
        std::stable_sort(words.begin(), words.end(), [](const ScoredWord& a, const ScoredWord& b) {
            return a.score != b.score ? a.score > b.score : a.word < b.word;
        });
        if (words.size() > top_n) {
            words.resize(top_n);
        }
        out.push_back(std::move(words));
    }
    return out;
}

namespace {

// Cosine that treats a zero operand as similarity 0; centered PCA
// coordinates can be exactly zero.
double safe_cosine(const double* a, const double* b, Eigen::Index d)
{
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        ab += a[j] * b[j];
        aa += a[j] * a[j];
        bb += b[j] * b[j];
    }
    if (aa == 0.0 || bb == 0.0) {
        return 0.0;
    }
    return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

std::string format_double(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::vector<std::vector<std::string>> representative_reviews(const ClusterAssignment& assignment,
                                                             const RowMatrix& points,
                                                             const std::vector<std::string>& ids,
                                                             std::size_t top_n)
{
    if (ids.size() != static_cast<std::size_t>(points.rows()) || ids.size() != assignment.labels.size()) {
        throw DataError("ids, points and assignment differ in length");
    }
    std::vector<std::vector<std::pair<double, std::size_t>>> members(assignment.k);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const auto c = static_cast<std::size_t>(assignment.labels[i]);
        const double s = safe_cosine(points.data() + i * points.cols(),
                                     assignment.centroids.data() + c * assignment.centroids.cols(),
                                     points.cols());
        members[c].emplace_back(s, i);
    }
    std::vector<std::vector<std::string>> out(assignment.k);
    for (std::size_t c = 0; c < assignment.k; ++c) {
        auto& m = members[c];
        std::sort(m.begin(), m.end(), [&](const auto& a, const auto& b) {
            return a.first != b.first ? a.first > b.first : ids[a.second] < ids[b.second];
        });
        for (std::size_t r = 0; r < m.size() && r < top_n; ++r) {
            out[c].push_back(ids[m[r].second]);
        }
    }
    return out;
}

std::vector<std::vector<std::string>> PctdResult::topic_word_lists() const
{
    std::vector<std::vector<std::string>> out;
    for (const TopicCluster& t : topics) {
        std::vector<std::string> words;
        for (const ScoredWord& w : t.words) {
            words.push_back(w.word);
        }
        out.push_back(std::move(words));
    }
    return out;
}

PctdResult run_pctd(const std::vector<TokenStream>& streams, const EmbeddingSet& embeddings,
                    std::size_t k, std::uint64_t seed, const PctdConfig& config)
{
    std::map<std::string, const TokenStream*> by_id;
    for (const TokenStream& s : streams) {
        if (!by_id.emplace(s.doc_id, &s).second) {
            throw DataError("duplicate review id '" + s.doc_id + "'");
        }
    }
    std::vector<std::string> missing;
    for (const auto& [id, s] : by_id) {
        if (embeddings.find(id) == nullptr) {
            missing.push_back(id);
        }
    }
    if (!missing.empty()) {
        std::string msg = std::to_string(missing.size()) + " review(s) lack embeddings:";
        for (std::size_t i = 0; i < missing.size() && i < 10; ++i) {
            msg += " " + missing[i];
        }
        throw DataError(msg);
    }
    if (k < 2) {
        throw UsageError("K must be at least 2");
    }
    if (k > by_id.size()) {
        throw DataError("K=" + std::to_string(k) + " exceeds the number of reviews (" +
                        std::to_string(by_id.size()) + ")");
    }

    PctdResult result;
    result.k = k;
    result.seed = seed;
    result.config = config;
    result.embedding_model = embeddings.model_name();

    EmbeddingSet normalized(embeddings.dim(), embeddings.model_name());
    for (const auto& [id, s] : by_id) {
        result.doc_ids.push_back(id);
        const EmbeddingVector& v = embeddings.at(id);
        if (l2_norm(v.values) == 0.0) {
            throw DataError("review '" + id + "' has a zero embedding");
        }
        normalized.insert(l2_normalize(v));
    }

    const std::size_t target =
        config.reduction == ReductionMethod::none ? embeddings.dim() : config.target_dim;
    const EmbeddingSet reduced = reduce_dim(normalized, config.reduction, target, seed);
    const auto n = static_cast<Eigen::Index>(result.doc_ids.size());
    RowMatrix points(n, static_cast<Eigen::Index>(reduced.dim()));
    for (Eigen::Index i = 0; i < n; ++i) {
        const std::vector<double>& v = reduced.vectors()[static_cast<std::size_t>(i)].values;
        double norm = 1.0;
        if (config.renormalize_after_reduction) {
            norm = l2_norm(v);
            if (norm == 0.0) {
                norm = 1.0;
            }
        }
        for (Eigen::Index j = 0; j < points.cols(); ++j) {
            points(i, j) = v[static_cast<std::size_t>(j)] / norm;
        }
    }

    result.assignment = kmeans_cluster(points, k, seed, config.kmeans);

    std::vector<std::vector<const TokenStream*>> clusters(k);
    for (std::size_t i = 0; i < result.doc_ids.size(); ++i) {
        clusters[static_cast<std::size_t>(result.assignment.labels[i])].push_back(by_id.at(result.doc_ids[i]));
    }
    std::size_t token_count = 0;
    for (const auto& [id, s] : by_id) {
        token_count += s->tokens.size();
    }
    std::vector<std::vector<ScoredWord>> words(k);
    if (token_count > 0) {
        words = topic_words(ctfidf(clusters), config.top_words);
    }
    const auto reps = representative_reviews(result.assignment, points, result.doc_ids, config.top_reviews);
    for (std::size_t c = 0; c < k; ++c) {
        result.topics.push_back({clusters[c].size(), std::move(words[c]), reps[c]});
    }
    result.projection = project_2d(normalized, seed);
    return result;
}

json pctd_manifest(const PctdResult& result, const std::string& run_id,
                   const std::string& assignment_csv, const std::string& projection_csv)
{
    json clusters = json::array();
    for (std::size_t c = 0; c < result.topics.size(); ++c) {
        const TopicCluster& t = result.topics[c];
        json words = json::array();
        for (const ScoredWord& w : t.words) {
            words.push_back({{"word", w.word}, {"score", w.score}});
        }
        clusters.push_back({{"index", c},
                            {"size", t.size},
                            {"words", words},
                            {"representative_ids", t.representative_ids}});
    }
    const PctdConfig& cfg = result.config;
    return {{"run_id", run_id},
            {"config",
             {{"reduction", to_string(cfg.reduction)},
              {"target_dim", cfg.reduction == ReductionMethod::none ? json(nullptr) : json(cfg.target_dim)},
              {"renormalize_after_reduction", cfg.renormalize_after_reduction},
              {"representative_space", "clustering"},
              {"max_iters", cfg.kmeans.max_iters},
              {"tol", cfg.kmeans.tol},
              {"top_words", cfg.top_words},
              {"top_reviews", cfg.top_reviews},
              {"embedding_model", result.embedding_model}}},
            {"seed", result.seed},
            {"K", result.k},
            {"num_reviews", result.doc_ids.size()},
            {"inertia", result.assignment.inertia},
            {"iterations_run", result.assignment.iterations_run},
            {"clusters", clusters},
            {"assignment_csv", assignment_csv},
            {"projection_csv", projection_csv}};
}

std::string assignment_csv(const PctdResult& result)
{
    std::string out = "doc_id,cluster\n";
    for (std::size_t i = 0; i < result.doc_ids.size(); ++i) {
        out += result.doc_ids[i] + "," + std::to_string(result.assignment.labels[i]) + "\n";
    }
    return out;
}

std::string projection_csv(const PctdResult& result)
{
    std::string out = "doc_id,x,y\n";
    for (const auto& [id, xy] : result.projection) {
        out += id + "," + format_double(xy.first) + "," + format_double(xy.second) + "\n";
    }
    return out;
}

void write_pctd_outputs(const PctdResult& result, const std::string& run_id,
                        const std::filesystem::path& dir)
{
    write_file(dir / "assignment.csv", assignment_csv(result));
    write_file(dir / "projection.csv", projection_csv(result));
    write_file(dir / "manifest.json",
               pctd_manifest(result, run_id, "assignment.csv", "projection.csv").dump(2) + "\n");
}

} // namespace privminer
