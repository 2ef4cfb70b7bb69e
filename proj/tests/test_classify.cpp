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

#include "privminer/classify.hpp"
#include "privminer/error.hpp"
#include "privminer/random.hpp"

#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <fstream>
#include <sstream>

using namespace privminer;
using testutil::TempDir;

namespace {

FeatureMatrix matrix(const RowMatrix& values)
{
    FeatureMatrix m;
    m.space.kind = FeatureKind::embedding;
    m.space.model_name = "test";
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
        m.space.names.push_back("f" + std::to_string(j));
    }
    for (Eigen::Index i = 0; i < values.rows(); ++i) {
        m.rows.push_back("d" + std::to_string(i));
    }
    m.values = values;
    return m;
}

std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST(Tfidf, HandExample)
{
    const std::vector<TokenStream> s{{"d1", {"a"}}, {"d2", {"a", "b"}}};
    const FeatureMatrix m = featurize_tfidf(s, build_vocabulary(s, 1));
    ASSERT_EQ(m.space.names, (std::vector<std::string>{"a", "b"}));
    EXPECT_DOUBLE_EQ(m.space.idf[0], 0.0);
    EXPECT_DOUBLE_EQ(m.space.idf[1], std::log(2.0));
    EXPECT_EQ(m.values(1, 0), 0.0);
    EXPECT_DOUBLE_EQ(m.values(1, 1), 1.0);   // normalized
    EXPECT_EQ(m.zero_rows, std::vector<std::size_t>{0});   // only 'a', idf 0
}

TEST(Tfidf, OutOfVocabularyRowIsZero)
{
    const std::vector<TokenStream> train{{"d1", {"a", "b"}}, {"d2", {"c"}}};
    const FeatureSpace space = fit_tfidf(train, build_vocabulary(train, 1));
    const FeatureMatrix m = transform_tfidf(space, {{"n", {"zzz"}}});
    EXPECT_EQ(m.values.row(0).norm(), 0.0);
    EXPECT_EQ(m.zero_rows.size(), 1u);
}

TEST(Logreg, SeparableAndBoundary)
{
    RowMatrix x(2, 1);
    x << -1.0, 1.0;
    const FeatureMatrix m = matrix(x);
    const ClassifierModel model = train_logreg(m, {0, 1}, {});
    const Predictions p = predict(model, m);
    EXPECT_EQ(p.labels, (std::vector<int>{0, 1}));

    const auto& params = std::get<LogregParams>(model.params);
    RowMatrix boundary(1, 1);
    boundary << -params.bias / params.weights[0];
    EXPECT_NEAR(predict(model, matrix(boundary)).probabilities[0], 0.5, 1e-12);
    EXPECT_THROW(train_logreg(m, {1, 1}, {}), DataError);
}

TEST(Logreg, GradientMatchesFiniteDifferences)
{
    Rng rng(4);
    RowMatrix x(30, 4);
    std::vector<int> y(30);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = rng.uniform() * 2 - 1;
    for (int& v : y) v = static_cast<int>(rng.below(2));
    LogregParams p{{0.3, -0.7, 0.1, 0.5}, -0.2};
    std::vector<double> grad;
    logistic_objective(x, y, p, 0.05, &grad);
    const double h = 1e-5;
    for (std::size_t j = 0; j <= 4; ++j) {
        LogregParams a = p, b = p;
        double& ta = j < 4 ? a.weights[j] : a.bias;
        double& tb = j < 4 ? b.weights[j] : b.bias;
        ta += h;
        tb -= h;
        const double fd = (logistic_objective(x, y, a, 0.05) - logistic_objective(x, y, b, 0.05)) / (2 * h);
        EXPECT_LT(std::abs(fd - grad[j]), 1e-6);
    }
}

TEST(Logreg, LossNonIncreasing)
{
    Rng rng(5);
    RowMatrix x(80, 3);
    std::vector<int> y(80);
    for (Eigen::Index i = 0; i < 80; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = rng.uniform() * 2 - 1;
        y[static_cast<std::size_t>(i)] = x(i, 0) + 0.3 * rng.uniform() > 0.1 ? 1 : 0;
    }
    LogregTrace trace;
    fit_logreg(x, y, {0.01, 5.0, 200, 0}, &trace);
    ASSERT_GT(trace.loss.size(), 1u);
    for (std::size_t i = 1; i < trace.loss.size(); ++i) {
        EXPECT_LE(trace.loss[i], trace.loss[i - 1]);
    }
    EXPECT_LT(trace.loss.back(), trace.loss.front());
}

TEST(Gbdt, InitScoreIsPriorLogOdds)
{
    RowMatrix x(10, 1);
    for (int i = 0; i < 10; ++i) x(i, 0) = i;
    std::vector<int> y(10, 1);
    y[3] = 0;
    const GbdtParams p = fit_gbdt(x, y, {0, 3, 0.1});
    EXPECT_DOUBLE_EQ(p.init_score, std::log(9.0));
    EXPECT_THROW(fit_gbdt(x, std::vector<int>(10, 1), {}), DataError);
}

TEST(Gbdt, ThresholdFixtureFitsWithinTenTrees)
{
    Rng rng(6);
    RowMatrix x(20, 3);
    std::vector<int> y(20);
    for (Eigen::Index i = 0; i < 20; ++i) {
        x(i, 0) = static_cast<double>(i);
        x(i, 1) = rng.uniform();
        x(i, 2) = rng.uniform();
        y[static_cast<std::size_t>(i)] = i >= 12 ? 1 : 0;
    }
    const FeatureMatrix m = matrix(x);
    GbdtConfig cfg;
    cfg.trees = 10;
    GbdtTrace trace;
    const ClassifierModel model = train_gbdt(m, y, cfg, &trace);
    const EvalReport r = evaluate(predict(model, m).labels, y);
    EXPECT_DOUBLE_EQ(r.f1, 1.0);
    ASSERT_EQ(trace.loss.size(), 11u);
    for (std::size_t i = 1; i < trace.loss.size(); ++i) {
        EXPECT_LE(trace.loss[i], trace.loss[i - 1]);
    }
}

TEST(Gbdt, StagedLossNonIncreasingOnNoisyData)
{
    Rng rng(7);
    RowMatrix x(150, 4);
    std::vector<int> y(150);
    for (Eigen::Index i = 0; i < 150; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) x(i, j) = rng.uniform();
        y[static_cast<std::size_t>(i)] = (x(i, 0) + x(i, 1) + 0.5 * rng.uniform() > 1.2) ? 1 : 0;
    }
    GbdtTrace trace;
    fit_gbdt(x, y, {}, &trace);
    for (std::size_t i = 1; i < trace.loss.size(); ++i) {
        EXPECT_LE(trace.loss[i], trace.loss[i - 1]);
    }
}

TEST(Model, SerializationRoundTripAndDeterminism)
{
    TempDir dir;
    Rng rng(8);
    RowMatrix x(60, 3);
    std::vector<int> y(60);
    for (Eigen::Index i = 0; i < 60; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) x(i, j) = rng.uniform();
        y[static_cast<std::size_t>(i)] = x(i, 2) > 0.4 ? 1 : 0;
    }
    const FeatureMatrix m = matrix(x);
    for (int kind = 0; kind < 2; ++kind) {
        auto train = [&] {
            return kind == 0 ? train_logreg(m, y, {}) : train_gbdt(m, y, {});
        };
        const ClassifierModel a = train();
        save_model(a, dir / "a.json");
        save_model(train(), dir / "b.json");
        EXPECT_EQ(slurp(dir / "a.json"), slurp(dir / "b.json"));
        const ClassifierModel back = load_model(dir / "a.json");
        const Predictions pa = predict(a, m), pb = predict(back, m);
        EXPECT_EQ(pa.labels, pb.labels);
        EXPECT_EQ(pa.probabilities, pb.probabilities);
    }
}

TEST(Model, FeatureSpaceMismatch)
{
    RowMatrix x(2, 1);
    x << -1.0, 1.0;
    const ClassifierModel model = train_logreg(matrix(x), {0, 1}, {});
    FeatureMatrix other = matrix(x);
    other.space.names[0] = "other";
    EXPECT_THROW(predict(model, other), DataError);
}

TEST(Evaluate, PublishedConfusion)
{
    const EvalReport r = report_from_confusion({188, 5, 20, 203});
    EXPECT_NEAR(r.precision * 100, 97.41, 0.005);
    EXPECT_NEAR(r.recall * 100, 90.38, 0.005);
    EXPECT_NEAR(r.f1 * 100, 93.77, 0.005);

    // The matrix read with TP=203, FP=20 disagrees by several points.
    const EvalReport swapped = report_from_confusion({203, 20, 5, 188});
    EXPECT_GT(std::abs(swapped.precision - r.precision) * 100, 5.0);
    EXPECT_GT(std::abs(swapped.recall - r.recall) * 100, 5.0);
}

TEST(Evaluate, Conventions)
{
    const EvalReport none = evaluate({0, 0, 0}, {1, 0, 1});
    EXPECT_EQ(none.precision, 0.0);
    EXPECT_EQ(none.recall, 0.0);
    EXPECT_EQ(none.f1, 0.0);
    const EvalReport perfect = evaluate({1, 0, 1}, {1, 0, 1});
    EXPECT_EQ(perfect.f1, 1.0);
    EXPECT_THROW(evaluate({1}, {1, 0}), DataError);
}

TEST(Evaluate, MatchesBruteForceCounts)
{
    Rng rng(10);
    for (int t = 0; t < 300; ++t) {
        std::vector<int> p(1 + rng.below(40)), y(p.size());
        for (std::size_t i = 0; i < p.size(); ++i) {
            p[i] = static_cast<int>(rng.below(2));
            y[i] = static_cast<int>(rng.below(2));
        }
        Confusion c;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (p[i] && y[i]) ++c.tp;
            else if (p[i]) ++c.fp;
            else if (y[i]) ++c.fn;
            else ++c.tn;
        }
        const EvalReport r = evaluate(p, y);
        EXPECT_EQ(r.confusion, c);
        const double prec = c.tp + c.fp ? double(c.tp) / double(c.tp + c.fp) : 0.0;
        const double rec = c.tp + c.fn ? double(c.tp) / double(c.tp + c.fn) : 0.0;
        EXPECT_NEAR(r.precision, prec, 1e-12);
        EXPECT_NEAR(r.recall, rec, 1e-12);
        EXPECT_NEAR(r.f1, prec + rec > 0 ? 2 * prec * rec / (prec + rec) : 0.0, 1e-12);
    }
}
