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
#include "privminer/pctd.hpp"
#include "privminer/synth.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <set>

using namespace privminer;

namespace {

RowMatrix rows(std::initializer_list<std::initializer_list<double>> values)
{
    RowMatrix m(static_cast<Eigen::Index>(values.size()), static_cast<Eigen::Index>(values.begin()->size()));
    Eigen::Index i = 0;
    for (const auto& r : values) {
        Eigen::Index j = 0;
        for (double v : r) m(i, j++) = v;
        ++i;
    }
    return m;
}

EmbeddingSet set_from(const RowMatrix& m)
{
    EmbeddingSet s(static_cast<std::size_t>(m.cols()), "test");
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        std::vector<double> v(m.row(i).begin(), m.row(i).end());
        char id[16];
        std::snprintf(id, sizeof id, "d%03d", static_cast<int>(i));
        s.insert({id, v, false});
    }
    return s;
}

// Literal evaluation of the c-TF-IDF formula from raw counts.
double literal_ctfidf(const std::vector<std::vector<TokenStream>>& clusters, std::size_t c, const std::string& w,
                      double base)
{
    double tf_wc = 0, tf_w = 0, total = 0;
    for (std::size_t k = 0; k < clusters.size(); ++k) {
        for (const auto& s : clusters[k]) {
            for (const auto& t : s.tokens) {
                total += 1;
                if (t == w) {
                    tf_w += 1;
                    if (k == c) tf_wc += 1;
                }
            }
        }
    }
    const double a = total / static_cast<double>(clusters.size());
    return tf_wc * std::log(1.0 + a / tf_w) / std::log(base);
}

} // namespace

TEST(Pca, LineYEqualsX)
{
    const RowMatrix x = rows({{0, 0}, {1, 1}, {2, 2}, {3, 3}});
    const Pca p = fit_pca(x, 1);
    EXPECT_NEAR(p.components(0, 0), 1 / std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(p.components(1, 0), 1 / std::sqrt(2.0), 1e-12);
    const RowMatrix z = p.transform(x);
    const RowMatrix back = (z * p.components.transpose()).rowwise() + p.mean.transpose();
    EXPECT_LT((back - x).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Pca, FullDimPreservesVarianceAndNoneIsIdentity)
{
    Rng rng(1);
    RowMatrix x(40, 4);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform();
    const EmbeddingSet s = set_from(x);
    const EmbeddingSet same = reduce_dim(s, ReductionMethod::none, 4, 0);
    for (std::size_t i = 0; i < s.size(); ++i) {
        EXPECT_EQ(same.vectors()[i].values, s.vectors()[i].values);
    }
    EXPECT_THROW(reduce_dim(s, ReductionMethod::pca, 5, 0), DataError);

    const RowMatrix centered = x.rowwise() - x.colwise().mean();
    const RowMatrix z = fit_pca(x, 4).transform(x);
    EXPECT_NEAR(z.squaredNorm(), centered.squaredNorm(), 1e-9);
}

TEST(Projection, Examples)
{
    EXPECT_THROW(project_2d(set_from(rows({{1, 2, 3}})), 0), DataError);

    const Projection2D line = project_2d(set_from(rows({{1, 2, 3}, {2, 4, 6}, {3, 6, 9}, {0, 0, 0}})), 0);
    for (const auto& [id, xy] : line) EXPECT_NEAR(xy.second, 0.0, 1e-9);

    const Projection2D same = project_2d(set_from(rows({{1, 1}, {1, 1}, {1, 1}})), 0);
    for (const auto& [id, xy] : same) {
        EXPECT_NEAR(xy.first, 0.0, 1e-12);
        EXPECT_NEAR(xy.second, 0.0, 1e-12);
    }

    Rng rng(2);
    RowMatrix x(10, 2);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform() * 4 - 2;
    const Projection2D p = project_2d(set_from(x), 0);
    std::vector<std::pair<double, double>> pts;
    for (const auto& [id, xy] : p) pts.push_back(xy);
    for (Eigen::Index i = 0; i < 10; ++i) {
        for (Eigen::Index j = 0; j < 10; ++j) {
            const double d0 = (x.row(i) - x.row(j)).norm();
            const double d1 = std::hypot(pts[i].first - pts[j].first, pts[i].second - pts[j].second);
            EXPECT_NEAR(d0, d1, 1e-9);
        }
    }
}

TEST(KMeansPP, Examples)
{
    const RowMatrix three = rows({{0}, {0}, {10}});
    for (std::uint64_t s = 0; s < 50; ++s) {
        Rng rng(s);
        const auto picks = kmeans_pp_seed(three, 2, 0, rng);
        EXPECT_EQ(picks[1], 2u);
    }
    const RowMatrix four = rows({{0}, {1}, {2}, {3}});
    Rng rng(9);
    auto all = kmeans_pp_seed(four, 4, rng);
    std::sort(all.begin(), all.end());
    EXPECT_EQ(all, (std::vector<std::size_t>{0, 1, 2, 3}));
    EXPECT_THROW(kmeans_pp_seed(three, 3, rng), DataError);
    EXPECT_EQ(count_distinct_rows(three), 2u);
}

TEST(KMeans, HandExample)
{
    const ClusterAssignment a = kmeans_cluster(rows({{0}, {0.1}, {10}, {10.1}}), 2, 3);
    EXPECT_EQ(a.labels[0], a.labels[1]);
    EXPECT_EQ(a.labels[2], a.labels[3]);
    EXPECT_NE(a.labels[0], a.labels[2]);
    EXPECT_NEAR(a.centroids(a.labels[0], 0), 0.05, 1e-12);
    EXPECT_NEAR(a.centroids(a.labels[2], 0), 10.05, 1e-12);
    EXPECT_NEAR(a.inertia, 0.01, 1e-12);
}

TEST(KMeans, KOneIsMeanAndKAllIsZeroInertia)
{
    const RowMatrix x = rows({{0, 1}, {2, 3}, {4, 8}});
    const ClusterAssignment one = kmeans_cluster(x, 1, 1);
    EXPECT_NEAR(one.centroids(0, 0), 2.0, 1e-12);
    EXPECT_NEAR(one.centroids(0, 1), 4.0, 1e-12);
    EXPECT_EQ(kmeans_cluster(x, 3, 1).inertia, 0.0);
}

TEST(KMeans, InertiaNonIncreasingAndDeterministic)
{
    Rng rng(12);
    for (int t = 0; t < 30; ++t) {
        RowMatrix x(20 + static_cast<Eigen::Index>(rng.below(100)), 3);
        for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform();
        const std::size_t k = 2 + rng.below(6);
        const ClusterAssignment a = kmeans_cluster(x, k, t);
        for (std::size_t i = 1; i < a.inertia_history.size(); ++i) {
            EXPECT_LE(a.inertia_history[i], a.inertia_history[i - 1] + 1e-12);
        }
        EXPECT_EQ(a.labels, kmeans_cluster(x, k, t).labels);
    }
}

TEST(KMeans, EmptyClusterRepaired)
{
    // Seeds chosen so that the middle seed captures no point.
    const RowMatrix x = rows({{0}, {0.1}, {10}, {10.1}});
    const ClusterAssignment a = kmeans_from_seeds(x, rows({{0}, {100}, {10}}));
    std::set<int> used(a.labels.begin(), a.labels.end());
    EXPECT_EQ(used.size(), 3u);
    EXPECT_THROW(kmeans_from_seeds(x, rows({{0}, {1}}), {0, 1e-6}), UsageError);
}

TEST(Ctfidf, HandExample)
{
    // Cluster 0 holds w three times, cluster 1 once; 20 tokens over K=2 gives A=10.
    std::vector<TokenStream> c0{{"a", {"w", "w", "w", "x", "x", "x", "x", "x", "x", "x"}}};
    std::vector<TokenStream> c1{{"b", {"w", "y", "y", "y", "y", "y", "y", "y", "y", "y"}}};
    const auto scores = ctfidf({{&c0[0]}, {&c1[0]}});
    EXPECT_NEAR(scores[0].at("w"), 3 * std::log(3.5), 1e-12);
    EXPECT_NEAR(scores[0].at("w"), 3.7583, 1e-4);
    EXPECT_EQ(scores[1].count("x"), 0u);
}

TEST(Ctfidf, MatchesLiteralAndRankingIsBaseInvariant)
{
    Rng rng(21);
    const std::vector<std::string> vocab{"a", "b", "c", "d", "e", "f"};
    for (int t = 0; t < 100; ++t) {
        std::vector<std::vector<TokenStream>> clusters(2 + rng.below(3));
        for (auto& c : clusters) {
            c.resize(1 + rng.below(3));
            for (auto& s : c) {
                s.tokens.resize(1 + rng.below(8));
                for (auto& tok : s.tokens) tok = vocab[rng.below(vocab.size())];
            }
        }
        std::vector<std::vector<const TokenStream*>> ptrs(clusters.size());
        for (std::size_t k = 0; k < clusters.size(); ++k) {
            for (const auto& s : clusters[k]) ptrs[k].push_back(&s);
        }
        const auto natural = ctfidf(ptrs);
        for (std::size_t k = 0; k < clusters.size(); ++k) {
            for (const auto& [w, s] : natural[k]) {
                EXPECT_NEAR(s, literal_ctfidf(clusters, k, w, std::exp(1.0)), 1e-12);
            }
        }
        const auto base_words = topic_words(natural, 10);
        for (double base : {2.0, 10.0}) {
            const auto words = topic_words(ctfidf(ptrs, base), 10);
            for (std::size_t k = 0; k < words.size(); ++k) {
                ASSERT_EQ(words[k].size(), base_words[k].size());
                for (std::size_t i = 0; i < words[k].size(); ++i) {
                    EXPECT_EQ(words[k][i].word, base_words[k][i].word);
                }
            }
        }
    }
}

TEST(TopicWords, TiesAndTruncation)
{
    const auto w = topic_words({{{"b", 1.0}, {"a", 1.0}, {"c", 2.0}}}, 10);
    ASSERT_EQ(w[0].size(), 3u);
    EXPECT_EQ(w[0][0].word, "c");
    EXPECT_EQ(w[0][1].word, "a");
    EXPECT_EQ(w[0][2].word, "b");
    EXPECT_EQ(topic_words({{{"b", 1.0}, {"a", 1.0}}}, 1)[0].size(), 1u);
    EXPECT_THROW(topic_words({}, 0), UsageError);
}

TEST(Representatives, HandCosines)
{
    ClusterAssignment a;
    a.k = 1;
    a.labels = {0, 0, 0};
    const RowMatrix pts = rows({{1, 0}, {0.9, 0.436}, {0, 1}});
    a.centroids = pts.colwise().mean();
    const auto reps = representative_reviews(a, pts, {"x", "y", "z"}, 10);
    // centroid (0.6333, 0.4787): cos(x)=0.798, cos(y)=0.9877, cos(z)=0.603
    EXPECT_EQ(reps[0], (std::vector<std::string>{"y", "x", "z"}));

    ClusterAssignment twin;
    twin.k = 2;
    twin.labels = {0, 0, 1};
    twin.centroids = rows({{1, 1}, {5, 0}});
    const auto r2 = representative_reviews(twin, rows({{1, 1}, {1, 1}, {5, 0}}), {"b", "a", "c"}, 10);
    EXPECT_EQ(r2[0], (std::vector<std::string>{"a", "b"}));
    EXPECT_EQ(r2[1], std::vector<std::string>{"c"});
}

TEST(Pipeline, PlantedTopicsArePure)
{
    const SyntheticCorpus corpus = make_synthetic_corpus(7, 40, 0);
    const std::vector<TokenStream> streams = tokenize_corpus(corpus.reviews, default_pipeline_tokenizer());
    const EmbeddingSet emb = BuiltinEmbedder::fit(streams, 256, 7).embed_all(streams);
    const PctdResult res = run_pctd(streams, emb, 5, 7);

    std::map<int, std::set<int>> groups;
    for (std::size_t i = 0; i < res.doc_ids.size(); ++i) {
        groups[res.assignment.labels[i]].insert(corpus.topic_of.at(res.doc_ids[i]));
    }
    EXPECT_EQ(groups.size(), 5u);
    for (const auto& [c, topics] : groups) EXPECT_EQ(topics.size(), 1u);

    // Words only come from the cluster's own tokens, representatives from its members.
    for (std::size_t c = 0; c < res.topics.size(); ++c) {
        std::set<std::string> tokens, members;
        for (std::size_t i = 0; i < res.doc_ids.size(); ++i) {
            if (res.assignment.labels[i] != static_cast<int>(c)) continue;
            members.insert(res.doc_ids[i]);
            for (const auto& s : streams) {
                if (s.doc_id == res.doc_ids[i]) tokens.insert(s.tokens.begin(), s.tokens.end());
            }
        }
        for (const auto& w : res.topics[c].words) EXPECT_TRUE(tokens.count(w.word));
        for (const auto& id : res.topics[c].representative_ids) EXPECT_TRUE(members.count(id));
        for (std::size_t i = 1; i < res.topics[c].words.size(); ++i) {
            EXPECT_LE(res.topics[c].words[i].score, res.topics[c].words[i - 1].score);
        }
    }
    EXPECT_EQ(pctd_manifest(res, "r", "a.csv", "p.csv").dump(),
              pctd_manifest(run_pctd(streams, emb, 5, 7), "r", "a.csv", "p.csv").dump());
}

TEST(Pipeline, ErrorsAndKEqualsN)
{
    const std::vector<TokenStream> streams{{"a", {"x", "y"}}, {"b", {"z"}}, {"c", {"w", "v"}}};
    EmbeddingSet emb(2, "t");
    emb.insert({"a", {1, 0}, false});
    emb.insert({"b", {0, 1}, false});
    EXPECT_THROW(run_pctd(streams, emb, 2, 1), DataError);   // missing c
    emb.insert({"c", {1, 1}, false});
    EXPECT_THROW(run_pctd(streams, emb, 1, 1), UsageError);
    EXPECT_THROW(run_pctd(streams, emb, 4, 1), DataError);

    PctdConfig cfg;
    cfg.reduction = ReductionMethod::none;
    const PctdResult r = run_pctd(streams, emb, 3, 1, cfg);
    for (std::size_t c = 0; c < 3; ++c) EXPECT_EQ(r.topics[c].size, 1u);
    EXPECT_EQ(pctd_manifest(r, "x", "a", "p")["config"]["target_dim"], nullptr);
}
