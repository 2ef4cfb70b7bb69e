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

#include <cmath>

namespace privminer {

namespace {

double sigmoid(double z)
{
    if (z >= 0.0) {
        return 1.0 / (1.0 + std::exp(-z));
    }
    const double e = std::exp(z);
    return e / (1.0 + e);
}

json space_to_json(const FeatureSpace& s)
{
    json j = {{"kind", to_string(s.kind)}, {"hash", s.hash()}, {"names", s.names}};
    if (!s.model_name.empty()) {
        j["model_name"] = s.model_name;
    }
    if (s.kind == FeatureKind::tfidf) {
        j["idf"] = s.idf;
    }
    return j;
}

FeatureSpace space_from_json(const json& j)
{
    FeatureSpace s;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "tfidf") {
        s.kind = FeatureKind::tfidf;
        s.idf = j.at("idf").get<std::vector<double>>();
    } else if (kind == "embedding") {
        s.kind = FeatureKind::embedding;
    } else {
        throw DataError("unknown feature kind '" + kind + "'");
    }
    s.names = j.at("names").get<std::vector<std::string>>();
    s.model_name = j.value("model_name", std::string{});
    if (j.at("hash").get<std::string>() != s.hash()) {
        throw DataError("feature space hash does not match its columns");
    }
    return s;
}

} // namespace

ClassifierModel train_logreg(const FeatureMatrix& x, const std::vector<int>& y,
                             const LogregConfig& config, LogregTrace* trace)
{
    ClassifierModel m;
    m.kind = ModelKind::logreg;
    m.space = x.space;
    m.seed = config.seed;
    m.params = fit_logreg(x.values, y, config, trace);
    m.config = {{"l2", config.l2}, {"lr", config.lr}, {"epochs", config.epochs}};
    return m;
}

ClassifierModel train_gbdt(const FeatureMatrix& x, const std::vector<int>& y,
                           const GbdtConfig& config, GbdtTrace* trace)
{
    ClassifierModel m;
    m.kind = ModelKind::gbdt;
    m.space = x.space;
    m.seed = config.seed;
    m.params = fit_gbdt(x.values, y, config, trace);
    m.config = {{"trees", config.trees},
                {"depth", config.depth},
                {"lr", config.lr},
                {"lambda", config.lambda},
                {"min_child_weight", config.min_child_weight}};
    return m;
}

Predictions predict(const ClassifierModel& model, const FeatureMatrix& x)
{
    if (x.space.hash() != model.space.hash() ||
        static_cast<std::size_t>(x.values.cols()) != model.space.size()) {
        throw DataError("feature space " + x.space.hash() + " does not match model feature space " +
                        model.space.hash());
    }
    const auto n = static_cast<std::int64_t>(x.values.rows());
    const auto d = static_cast<std::size_t>(x.values.cols());
    Predictions out;
    out.labels.resize(static_cast<std::size_t>(n));
    out.probabilities.resize(static_cast<std::size_t>(n));
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        const double* row = x.values.data() + i * static_cast<std::int64_t>(d);
        double z = 0.0;
        if (const auto* lr = std::get_if<LogregParams>(&model.params)) {
            z = lr->bias;
            for (std::size_t j = 0; j < d; ++j) {
                z += lr->weights[j] * row[j];
            }
        } else {
            const auto& gb = std::get<GbdtParams>(model.params);
            z = gb.init_score;
            for (const RegressionTree& t : gb.trees) {
                z += t.predict(row);
            }
        }
        const double p = sigmoid(z);
        out.probabilities[i] = p;
        out.labels[i] = p >= 0.5 ? 1 : 0;
    }
    return out;
}

json model_to_json(const ClassifierModel& model)
{
    json j = {{"format", "privminer-model"},
              {"version", 1},
              {"kind", model.kind == ModelKind::logreg ? "logreg" : "gbdt"},
              {"seed", model.seed},
              {"config", model.config},
              {"features", space_to_json(model.space)}};
    if (const auto* lr = std::get_if<LogregParams>(&model.params)) {
        j["params"] = {{"weights", lr->weights}, {"bias", lr->bias}};
    } else {
        const auto& gb = std::get<GbdtParams>(model.params);
        json trees = json::array();
        for (const RegressionTree& t : gb.trees) {
            json nodes = json::array();
            for (const TreeNode& n : t.nodes) {
                if (n.feature < 0) {
                    nodes.push_back({{"value", n.value}});
                } else {
                    nodes.push_back({{"feature", n.feature},
                                     {"threshold", n.threshold},
                                     {"left", n.left},
                                     {"right", n.right}});
                }
            }
            trees.push_back(std::move(nodes));
        }
        j["params"] = {{"init_score", gb.init_score}, {"learning_rate", gb.learning_rate}, {"trees", trees}};
    }
    return j;
}

ClassifierModel model_from_json(const json& j)
{
    try {
        if (j.at("format").get<std::string>() != "privminer-model") {
            throw DataError("not a privminer model file");
        }
        ClassifierModel m;
        m.space = space_from_json(j.at("features"));
        m.seed = j.at("seed").get<std::uint64_t>();
        m.config = j.value("config", json::object());
        const std::string kind = j.at("kind").get<std::string>();
        const json& p = j.at("params");
        if (kind == "logreg") {
            m.kind = ModelKind::logreg;
            LogregParams lr{p.at("weights").get<std::vector<double>>(), p.at("bias").get<double>()};
            if (lr.weights.size() != m.space.size()) {
                throw DataError("weight count does not match feature count");
            }
            m.params = std::move(lr);
        } else if (kind == "gbdt") {
            m.kind = ModelKind::gbdt;
            GbdtParams gb;
            gb.init_score = p.at("init_score").get<double>();
            gb.learning_rate = p.at("learning_rate").get<double>();
            for (const json& tj : p.at("trees")) {
                RegressionTree t;
                for (const json& nj : tj) {
                    TreeNode n;
                    if (nj.contains("value")) {
                        n.value = nj.at("value").get<double>();
                    } else {
                        n.feature = nj.at("feature").get<int>();
                        n.threshold = nj.at("threshold").get<double>();
                        n.left = nj.at("left").get<int>();
                        n.right = nj.at("right").get<int>();
                        if (n.feature >= static_cast<int>(m.space.size())) {
                            throw DataError("tree split on unknown feature");
                        }
                    }
                    t.nodes.push_back(n);
                }
                const int count = static_cast<int>(t.nodes.size());
                for (const TreeNode& n : t.nodes) {
                    if (n.feature >= 0 && (n.left <= 0 || n.left >= count || n.right <= 0 || n.right >= count)) {
                        throw DataError("tree child index out of range");
                    }
                }
                if (t.nodes.empty()) {
                    throw DataError("empty tree in model");
                }
                gb.trees.push_back(std::move(t));
            }
            m.params = std::move(gb);
        } else {
            throw DataError("unknown model kind '" + kind + "'");
        }
        return m;
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed model file: ") + e.what());
    }
}

void save_model(const ClassifierModel& model, const std::filesystem::path& path)
{
    write_file(path, model_to_json(model).dump(1) + "\n");
}

ClassifierModel load_model(const std::filesystem::path& path)
{
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

EvalReport report_from_confusion(const Confusion& c)
{
    EvalReport r;
    r.confusion = c;
    const double tp = static_cast<double>(c.tp);
    r.precision = c.tp + c.fp == 0 ? 0.0 : tp / static_cast<double>(c.tp + c.fp);
    r.recall = c.tp + c.fn == 0 ? 0.0 : tp / static_cast<double>(c.tp + c.fn);
    r.f1 = r.precision + r.recall == 0.0 ? 0.0 : 2.0 * r.precision * r.recall / (r.precision + r.recall);
    return r;
}

EvalReport evaluate(const std::vector<int>& predicted, const std::vector<int>& truth)
{
    if (predicted.size() != truth.size()) {
        throw DataError("prediction and truth lengths differ (" + std::to_string(predicted.size()) +
                        " vs " + std::to_string(truth.size()) + ")");
    }
    if (truth.empty()) {
        throw DataError("nothing to evaluate");
    }
    Confusion c;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const bool p = predicted[i] == 1;
        const bool t = truth[i] == 1;
        if (p && t) {
            ++c.tp;
        } else if (p) {
            ++c.fp;
        } else if (t) {
            ++c.fn;
        } else {
            ++c.tn;
        }
    }
    return report_from_confusion(c);
}

json to_json(const EvalReport& r)
{
    return {{"precision", r.precision},
            {"recall", r.recall},
            {"f1", r.f1},
            {"confusion",
             {{"tp", r.confusion.tp}, {"fp", r.confusion.fp}, {"fn", r.confusion.fn}, {"tn", r.confusion.tn}}}};
}

std::vector<ExternalPrediction> load_predictions(const std::filesystem::path& path)
{
    std::vector<ExternalPrediction> out;
    for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        if (!obj.is_object() || !obj.contains("id") || !obj.contains("label")) {
            throw DataError(path.string() + ": line " + std::to_string(line) + ": expected {\"id\",\"label\",\"prob\"}");
        }
        ExternalPrediction p{obj["id"].get<std::string>(), obj["label"].get<int>(), obj.value("prob", 0.0)};
        if (p.label != 0 && p.label != 1) {
            throw DataError(path.string() + ": line " + std::to_string(line) + ": label must be 0 or 1");
        }
        out.push_back(std::move(p));
    });
    return out;
}

void write_predictions(const std::vector<std::string>& ids, const Predictions& p,
                       const std::filesystem::path& path)
{
    std::string out;
    for (std::size_t i = 0; i < ids.size(); ++i) {
        out += json{{"id", ids[i]}, {"label", p.labels[i]}, {"prob", p.probabilities[i]}}.dump();
        out += '\n';
    }
    write_file(path, out);
}

} // namespace privminer
