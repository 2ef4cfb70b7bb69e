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
#include "privminer/embedding.hpp"
#include "privminer/jsonl.hpp"
#include "privminer/kernels.hpp"
#include "privminer/random.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace privminer {

// ---- dimensionality reduction ----------------------------------------------

/// Principal axes of a point set, largest variance first. Each component's
/// largest-magnitude entry is positive (first such entry on ties).
struct Pca {
    Eigen::VectorXd mean;
    Eigen::MatrixXd components;   // dim x k, orthonormal columns
    Eigen::VectorXd variances;    // k eigenvalues of the covariance

    RowMatrix transform(const RowMatrix& x) const;
};

Pca fit_pca(const RowMatrix& x, std::size_t k);

enum class ReductionMethod { none, pca };

const char* to_string(ReductionMethod m);
ReductionMethod parse_reduction(std::string_view s);

/// method=none requires target_dim == dim and returns the input. The seed
/// is accepted for reducer interchangeability; PCA is deterministic.
EmbeddingSet reduce_dim(const EmbeddingSet& vectors, ReductionMethod method,
                        std::size_t target_dim, std::uint64_t seed);

using Projection2D = std::map<std::string, std::pair<double, double>>;

/// Centered PCA to two components. Throws DataError for fewer than 2 points.
Projection2D project_2d(const EmbeddingSet& points, std::uint64_t seed);

// ---- clustering -------------------------------------------------------------

struct KMeansConfig {
    int max_iters = 300;
    double tol = 1e-6;
};

/// K-means++: first centroid uniform, then each next with probability
/// proportional to the squared distance to the nearest chosen centroid.
/// Returns the chosen row indices. Throws DataError when K exceeds the
/// number of distinct points.
std::vector<std::size_t> kmeans_pp_seed(const RowMatrix& points, std::size_t k, Rng& rng);
/// Same with the first pick fixed.
std::vector<std::size_t> kmeans_pp_seed(const RowMatrix& points, std::size_t k,
                                        std::size_t first, Rng& rng);

struct ClusterAssignment {
    std::size_t k = 0;
    std::vector<int> labels;        // per row
    RowMatrix centroids;            // k x dim
    double inertia = 0.0;
    int iterations_run = 0;
    /// Inertia after every assignment, repair and update step, in order.
    std::vector<double> inertia_history;
};

/// Lloyd iterations from K-means++ seeds. Ties go to the lowest cluster
/// index; an emptied cluster is reseeded with the point farthest from its
/// centroid. Stops when no centroid moves more than tol, or at max_iters.
ClusterAssignment kmeans_cluster(const RowMatrix& points, std::size_t k, std::uint64_t seed,
                                 const KMeansConfig& config = {});
ClusterAssignment kmeans_from_seeds(const RowMatrix& points, const RowMatrix& seeds,
                                    const KMeansConfig& config = {});

std::size_t count_distinct_rows(const RowMatrix& points);

// ---- topic words ------------------------------------------------------------

/// Per-cluster word scores TF_{w,c} * log(1 + A / TF_w), where A is the
/// total token count divided by the number of clusters. `log_base` 0 means
/// natural log.
std::vector<std::map<std::string, double>> ctfidf(
    const std::vector<std::vector<const TokenStream*>>& clusters, double log_base = 0.0);

struct ScoredWord {
    std::string word;
    double score = 0.0;

    bool operator==(const ScoredWord&) const = default;
};

/// Descending score, ties lexicographic, at most top_n.
std::vector<std::vector<ScoredWord>> topic_words(
    const std::vector<std::map<std::string, double>>& scores, std::size_t top_n = 10);

/// Per cluster: member ids sorted by cosine to the cluster centroid
/// (descending, ties by id), truncated to top_n. `ids` parallels the rows.
std::vector<std::vector<std::string>> representative_reviews(const ClusterAssignment& assignment,
                                                             const RowMatrix& points,
                                                             const std::vector<std::string>& ids,
                                                             std::size_t top_n = 10);

// ---- pipeline -----------------------------------------------------------------

struct PctdConfig {
    ReductionMethod reduction = ReductionMethod::pca;
    std::size_t target_dim = 5;
    bool renormalize_after_reduction = false;
    KMeansConfig kmeans;
    std::size_t top_words = 10;
    std::size_t top_reviews = 10;
};

struct TopicCluster {
    std::size_t size = 0;
    std::vector<ScoredWord> words;
    std::vector<std::string> representative_ids;
};

struct PctdResult {
    std::size_t k = 0;
    std::uint64_t seed = 0;
    PctdConfig config;
    std::string embedding_model;
    std::vector<std::string> doc_ids;   // sorted; row order of every matrix
    ClusterAssignment assignment;
    std::vector<TopicCluster> topics;
    Projection2D projection;

    std::vector<std::vector<std::string>> topic_word_lists() const;
};

/// normalize -> reduce -> K-means -> c-TF-IDF -> topic words ->
/// representative reviews -> 2-D projection. `streams` are the tokenized
/// reviews (any order); every stream needs an embedding.
PctdResult run_pctd(const std::vector<TokenStream>& streams, const EmbeddingSet& embeddings,
                    std::size_t k, std::uint64_t seed, const PctdConfig& config = {});

/// Run manifest; `assignment_csv` and `projection_csv` are recorded as given.
json pctd_manifest(const PctdResult& result, const std::string& run_id,
                   const std::string& assignment_csv, const std::string& projection_csv);

std::string assignment_csv(const PctdResult& result);
std::string projection_csv(const PctdResult& result);

/// Writes manifest.json, assignment.csv and projection.csv into `dir`.
void write_pctd_outputs(const PctdResult& result, const std::string& run_id,
                        const std::filesystem::path& dir);

} // namespace privminer
