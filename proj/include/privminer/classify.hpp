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

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace privminer {

enum class FeatureKind { tfidf, embedding };

const char* to_string(FeatureKind kind);

/// Column layout of a feature matrix. For TF-IDF it also carries the
/// training idf so new documents can be mapped into the same space.
struct FeatureSpace {
    FeatureKind kind = FeatureKind::tfidf;
    std::vector<std::string> names;
    std::vector<double> idf;
    std::string model_name;

    std::size_t size() const { return names.size(); }
    /// FNV-1a over kind, model name and column names, as 16 hex digits.
    std::string hash() const;
};

struct FeatureMatrix {
    std::vector<std::string> rows;
    FeatureSpace space;
    RowMatrix values;
    /// Rows with no in-vocabulary term (all zeros).
    std::vector<std::size_t> zero_rows;
};

/// idf(t) = ln(N / df(t)) over `streams`, no smoothing. Terms present in
/// every document get idf 0.
FeatureSpace fit_tfidf(const std::vector<TokenStream>& streams, const Vocabulary& vocab);

/// tf * idf, rows L2-normalized unless all-zero.
FeatureMatrix transform_tfidf(const FeatureSpace& space, const std::vector<TokenStream>& streams);

FeatureMatrix featurize_tfidf(const std::vector<TokenStream>& streams, const Vocabulary& vocab);

/// Rows are the embeddings of `ids` in order.
FeatureMatrix featurize_embedding(const EmbeddingSet& set, const std::vector<std::string>& ids);

struct LogregConfig {
    double l2 = 1e-4;
    double lr = 1.0;
    int epochs = 300;
    std::uint64_t seed = 0;
};

struct LogregParams {
    std::vector<double> weights;
    double bias = 0.0;
};

/// Mean logistic loss plus (l2 / 2) * ||w||^2 (bias not regularized), and
/// its gradient (weights followed by bias).
double logistic_objective(const RowMatrix& x, const std::vector<int>& y, const LogregParams& p,
                          double l2, std::vector<double>* gradient = nullptr);

struct LogregTrace {
    std::vector<double> loss;
};

LogregParams fit_logreg(const RowMatrix& x, const std::vector<int>& y, const LogregConfig& config,
                        LogregTrace* trace = nullptr);

struct GbdtConfig {
    int trees = 100;
    int depth = 3;
    double lr = 0.1;
    double lambda = 1.0;
    double min_child_weight = 1e-3;
    std::uint64_t seed = 0;
};

struct TreeNode {
    int feature = -1;          // -1 for a leaf
    double threshold = 0.0;    // x <= threshold goes left
    int left = -1;
    int right = -1;
    double value = 0.0;        // leaf output, already scaled by the step

    bool operator==(const TreeNode&) const = default;
};

struct RegressionTree {
    std::vector<TreeNode> nodes;   // nodes[0] is the root

    double predict(const double* row) const;
};

struct GbdtParams {
    double init_score = 0.0;
    double learning_rate = 0.1;
    std::vector<RegressionTree> trees;
};

struct GbdtTrace {
    /// Training loss after the init score and after each added tree.
    std::vector<double> loss;
};

GbdtParams fit_gbdt(const RowMatrix& x, const std::vector<int>& y, const GbdtConfig& config,
                    GbdtTrace* trace = nullptr);

enum class ModelKind { logreg, gbdt };

struct ClassifierModel {
    ModelKind kind = ModelKind::logreg;
    FeatureSpace space;
    std::uint64_t seed = 0;
    std::variant<LogregParams, GbdtParams> params;
    json config;
};

ClassifierModel train_logreg(const FeatureMatrix& x, const std::vector<int>& y,
                             const LogregConfig& config, LogregTrace* trace = nullptr);
ClassifierModel train_gbdt(const FeatureMatrix& x, const std::vector<int>& y,
                           const GbdtConfig& config, GbdtTrace* trace = nullptr);

struct Predictions {
    std::vector<int> labels;
    std::vector<double> probabilities;
};

/// label = 1 iff probability >= 0.5. Throws DataError if the matrix's
/// feature space does not match the model's.
Predictions predict(const ClassifierModel& model, const FeatureMatrix& x);

json model_to_json(const ClassifierModel& model);
ClassifierModel model_from_json(const json& j);
void save_model(const ClassifierModel& model, const std::filesystem::path& path);
ClassifierModel load_model(const std::filesystem::path& path);

struct Confusion {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;

    bool operator==(const Confusion&) const = default;
};

struct EvalReport {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    Confusion confusion;
};

/// Label 1 is the positive class; 0 is used when a denominator is 0.
EvalReport evaluate(const std::vector<int>& predicted, const std::vector<int>& truth);
EvalReport report_from_confusion(const Confusion& c);
json to_json(const EvalReport& r);

struct ExternalPrediction {
    std::string id;
    int label = 0;
    double prob = 0.0;
};

/// JSONL of {"id","label","prob"}, e.g. produced by an external model.
std::vector<ExternalPrediction> load_predictions(const std::filesystem::path& path);
void write_predictions(const std::vector<std::string>& ids, const Predictions& p,
                       const std::filesystem::path& path);

} // namespace privminer
