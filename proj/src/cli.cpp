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

#include "privminer/cli.hpp"

#include "privminer/annotation.hpp"
#include "privminer/bootstrap.hpp"
#include "privminer/classify.hpp"
#include "privminer/corpus.hpp"
#include "privminer/embedding.hpp"
#include "privminer/error.hpp"
#include "privminer/pctd.hpp"
#include "privminer/retrieval.hpp"
#include "privminer/service.hpp"
#include "privminer/synth.hpp"
#include "privminer/topic_eval.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <iostream>
#include <set>

namespace privminer {

namespace fs = std::filesystem;

namespace {

const std::vector<std::string> kDefaultExclusions = {"contact*", "changes*"};
constexpr const char* kQueryId = "__query__";

std::vector<TokenStream> tokenize_reviews(const Corpus& corpus)
{
    return tokenize_corpus(corpus, default_pipeline_tokenizer());
}

std::string fmt(double v, int digits = 6)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string list_ids(const std::vector<std::string>& ids)
{
    std::string msg;
    for (std::size_t i = 0; i < ids.size() && i < 10; ++i) {
        msg += (i ? ", " : "") + ids[i];
    }
    if (ids.size() > 10) {
        msg += ", ...";
    }
    return msg;
}

/// Every review must have a vector in `set`.
void require_embeddings(const Corpus& corpus, const EmbeddingSet& set)
{
    std::vector<std::string> missing;
    for (const Review& r : corpus) {
        if (!set.find(r.id)) {
            missing.push_back(r.id);
        }
    }
    if (!missing.empty()) {
        throw DataError(std::to_string(missing.size()) + " review(s) have no embedding: " + list_ids(missing));
    }
}

std::pair<std::size_t, std::size_t> parse_sweep(const std::string& s)
{
    const auto dots = s.find("..");
    try {
        if (dots == std::string::npos) {
            throw std::invalid_argument(s);
        }
        std::size_t used = 0;
        const std::string lo_s = s.substr(0, dots);
        const std::string hi_s = s.substr(dots + 2);
        const unsigned long lo = std::stoul(lo_s, &used);
        if (used != lo_s.size()) {
            throw std::invalid_argument(s);
        }
        const unsigned long hi = std::stoul(hi_s, &used);
        if (used != hi_s.size() || lo > hi) {
            throw std::invalid_argument(s);
        }
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw UsageError("--k-sweep expects LO..HI, got '" + s + "'");
    }
}

/// Corpus restricted to ids labeled 1 in `dataset` (all reviews if empty).
Corpus select_positive(const Corpus& corpus, const std::string& dataset)
{
    if (dataset.empty()) {
        return corpus;
    }
    const LabeledDataset d = load_dataset(dataset);
    std::set<std::string> keep;
    for (const LabeledItem& i : d.items) {
        if (i.label == 1) {
            keep.insert(i.review_id);
        }
    }
    Corpus out;
    for (const Review& r : corpus) {
        if (keep.count(r.id)) {
            out.add(r);
        }
    }
    if (out.empty()) {
        throw DataError("no review of the corpus is labeled positive in " + dataset);
    }
    return out;
}

// ---- embed ---------------------------------------------------------------------

struct EmbedOpts {
    std::string reviews, policy, out;
    std::vector<std::string> exclude = kDefaultExclusions;
    std::size_t dim = 256;
    std::uint64_t seed = 0;
    std::size_t min_df = 1;
};

EmbeddingSet embed_with_query(const Corpus& corpus, const std::string& policy_path,
                              const std::vector<std::string>& exclude, std::size_t dim, std::uint64_t seed,
                              std::size_t min_df)
{
    const std::vector<TokenStream> streams = tokenize_reviews(corpus);
    const BuiltinEmbedder embedder = BuiltinEmbedder::fit(streams, dim, seed, min_df);
    EmbeddingSet set = embedder.embed_all(streams);
    if (!policy_path.empty()) {
        const PolicyDocument policy = load_policy(policy_path, exclude);
        const TokenStream q = tokenize(policy.text, default_pipeline_tokenizer(), kQueryId);
        set.insert(embedder.embed(q));
    }
    return set;
}

int cmd_embed(const EmbedOpts& o, std::ostream& out)
{
    const Corpus corpus = load_reviews(o.reviews);
    const EmbeddingSet set = embed_with_query(corpus, o.policy, o.exclude, o.dim, o.seed, o.min_df);
    write_embeddings(set, o.out);
    out << "wrote " << set.size() << " vectors (" << set.model_name() << ") to " << o.out << "\n";
    return kExitOk;
}

// ---- retrieve ------------------------------------------------------------------

struct RetrieveOpts {
    std::string policy, reviews, embeddings, out, judgments, query_id = kQueryId;
    std::vector<std::string> exclude = kDefaultExclusions;
    std::size_t top_m = 100, dim = 256, min_df = 1;
    std::uint64_t seed = 0;
};

int cmd_retrieve(const RetrieveOpts& o, std::ostream& out, std::ostream& err)
{
    if (o.top_m == 0) {
        throw UsageError("--top-m must be at least 1");
    }
    const Corpus corpus = load_reviews(o.reviews);
    EmbeddingSet set;
    if (o.embeddings.empty()) {
        if (o.policy.empty()) {
            throw UsageError("--policy is required without --embeddings");
        }
        set = embed_with_query(corpus, o.policy, o.exclude, o.dim, o.seed, o.min_df);
    } else {
        set = load_embeddings(o.embeddings);
    }
    require_embeddings(corpus, set);
    const EmbeddingVector* query = set.find(o.query_id);
    if (!query) {
        throw DataError("embeddings contain no query vector '" + o.query_id + "'");
    }
    EmbeddingSet docs(set.dim(), set.model_name());
    for (const Review& r : corpus) {
        docs.insert(set.at(r.id));
    }
    const RankedList full = rank_reviews(*query, docs);
    const RankedList top = top_m(full, o.top_m);
    for (const std::string& id : full.skipped_degenerate) {
        err << "warning: review " << id << " has a degenerate embedding and was not ranked\n";
    }

    const fs::path dir = o.out;
    write_ranked_csv(top, dir / "ranked.csv");
    json manifest = {{"stage", "retrieve"},
                     {"config",
                      {{"top_m", o.top_m},
                       {"query_id", o.query_id},
                       {"exclude", o.exclude},
                       {"embedding_model", set.model_name()},
                       {"dim", set.dim()}}},
                     {"seed", o.seed},
                     {"inputs", {{"policy", o.policy}, {"reviews", o.reviews}, {"embeddings", o.embeddings}}},
                     {"outputs", {{"ranked_csv", "ranked.csv"}}},
                     {"ranked", top.entries.size()},
                     {"skipped_degenerate", full.skipped_degenerate}};
    if (!o.judgments.empty()) {
        const RelevanceJudgments j = load_judgments(o.judgments);
        manifest["metrics"] = {{"ap", average_precision(top, j)},
                               {"precision", precision_at_k(top, j, top.entries.size())},
                               {"recall", recall_at_k(top, j, top.entries.size())},
                               {"f1", f1_at_k(top, j, top.entries.size())}};
    }
    write_file(dir / "manifest.json", manifest.dump(2) + "\n");
    out << "ranked " << top.entries.size() << " of " << corpus.size() << " reviews -> "
        << (dir / "ranked.csv").string() << "\n";
    return kExitOk;
}

// ---- eval-retrieval ----------------------------------------------------------

struct EvalRetrievalOpts {
    std::string ranked, judgments, out;
    std::vector<std::size_t> ks;
    std::size_t k_max = 0;
};

int cmd_eval_retrieval(const EvalRetrievalOpts& o, std::ostream& out)
{
    const RankedList list = load_ranked_csv(o.ranked);
    const RelevanceJudgments j = load_judgments(o.judgments);
    std::vector<std::size_t> ks = o.ks;
    if (ks.empty()) {
        ks.push_back(list.entries.size());
    }
    json at_k = json::array();
    for (std::size_t k : ks) {
        if (k == 0) {
            throw UsageError("k must be at least 1");
        }
        at_k.push_back({{"k", k},
                        {"precision", precision_at_k(list, j, k)},
                        {"recall", recall_at_k(list, j, k)},
                        {"f1", f1_at_k(list, j, k)},
                        {"ap", average_precision(list, j, k)}});
    }
    json report = {{"total_relevant", j.total_relevant()}, {"ranked", list.entries.size()}, {"at_k", at_k},
                   {"ap", average_precision(list, j)}};
    if (o.k_max > 0) {
        const F1Curve curve = f1_curve(list, j, o.k_max);
        json points = json::array();
        for (const auto& [k, f] : curve.points) {
            points.push_back({{"k", k}, {"f1", f}});
        }
        report["f1_curve"] = {{"points", points}, {"best_k", curve.best_k}, {"best_f1", curve.best_f1}};
    }
    if (o.out.empty()) {
        out << report.dump(2) << "\n";
    } else {
        write_file(o.out, report.dump(2) + "\n");
    }
    return kExitOk;
}

// ---- annotate ------------------------------------------------------------------

struct AnnotateOpts {
    std::string store, id, ranked, reviews, review, annotator, label, out, resolve;
    std::vector<std::string> annotators;
    std::size_t top_m = 0;
};

fs::path session_dir(const AnnotateOpts& o)
{
    return o.store.empty() ? resolve_data_dir("privminer-data") / "sessions" : fs::path(o.store);
}

std::optional<int> parse_cli_label(const std::string& s)
{
    if (s == "1") {
        return 1;
    }
    if (s == "0") {
        return 0;
    }
    if (s == "skip" || s == "s") {
        return std::nullopt;
    }
    throw UsageError("label must be 1, 0 or skip");
}

int cmd_annotate_create(const AnnotateOpts& o, std::ostream& out)
{
    RankedList list = load_ranked_csv(o.ranked);
    if (o.top_m > 0) {
        list = top_m(list, o.top_m);
    }
    std::vector<Candidate> candidates;
    const Corpus corpus = o.reviews.empty() ? Corpus{} : load_reviews(o.reviews);
    for (const RankedEntry& e : list.entries) {
        Candidate c{e.doc_id, {}, {}};
        if (const Review* r = corpus.find(e.doc_id)) {
            c.text = r->text;
            c.app = r->app;
        } else if (!o.reviews.empty()) {
            throw DataError("ranked review '" + e.doc_id + "' is not in " + o.reviews);
        }
        candidates.push_back(std::move(c));
    }
    fs::create_directories(session_dir(o));
    SessionStore store(session_dir(o));
    const AnnotationSession s = store.create(o.id, std::move(candidates), o.annotators);
    out << "created session " << s.id() << " with " << s.candidates().size() << " candidates\n";
    return kExitOk;
}

int cmd_annotate_label(const AnnotateOpts& o, std::istream& in, std::ostream& out)
{
    SessionStore store(session_dir(o));
    if (!o.review.empty()) {
        store.label(o.id, o.review, o.annotator, parse_cli_label(o.label), utc_timestamp());
        return kExitOk;
    }
    // Interactive loop: 1 / 0 / s, q to stop.
    for (;;) {
        const AnnotationSession s = store.load(o.id);
        if (!s.has_annotator(o.annotator)) {
            throw UsageError("unknown annotator '" + o.annotator + "'");
        }
        const auto next = s.next_unlabeled(o.annotator);
        if (!next) {
            out << "all candidates labeled\n";
            return kExitOk;
        }
        for (const Candidate& c : s.candidates()) {
            if (c.id == *next) {
                out << "\n[" << c.id << "] " << (c.app.empty() ? "" : "(" + c.app + ") ") << c.text << "\n";
            }
        }
        out << "privacy? [1/0/s/q] " << std::flush;
        std::string answer;
        if (!std::getline(in, answer) || answer == "q") {
            return kExitOk;
        }
        try {
            store.label(o.id, *next, o.annotator, parse_cli_label(answer), utc_timestamp());
        } catch (const UsageError& e) {
            out << e.what() << "\n";
        }
    }
}

int cmd_annotate_agreement(const AnnotateOpts& o, std::ostream& out)
{
    SessionStore store(session_dir(o));
    const AnnotationSession s = store.load(o.id);
    const double kappa = cohen_kappa(s);
    out << json{{"session", s.id()}, {"annotators", s.annotators()}, {"kappa", kappa}}.dump(2) << "\n";
    return kExitOk;
}

int cmd_annotate_export(const AnnotateOpts& o, std::ostream& out)
{
    std::map<std::string, std::optional<int>> resolutions;
    if (!o.resolve.empty()) {
        for_each_jsonl(o.resolve, [&](std::size_t line, const json& obj) {
            if (!obj.is_object() || !obj.contains("id") || !obj.contains("label")) {
                throw DataError(o.resolve + ": line " + std::to_string(line) + ": expected {\"id\",\"label\"}");
            }
            resolutions[obj["id"].get<std::string>()] =
                obj["label"].is_null() ? std::nullopt : std::optional<int>(obj["label"].get<int>());
        });
    }
    SessionStore store(session_dir(o));
    const AdjudicationResult r = store.adjudicate(o.id, resolutions, utc_timestamp());
    write_dataset(r.dataset, o.out);
    out << "exported " << r.dataset.size() << " items (" << r.dataset.count(1) << " positive) to " << o.out
        << "\n";
    return kExitOk;
}

// ---- split / train / classify / evaluate ---------------------------------------

struct SplitOpts {
    std::string dataset, train_out, test_out;
    double ratio = 0.8;
    std::uint64_t seed = 0;
    bool balance = false;
};

int cmd_split(const SplitOpts& o, std::ostream& out)
{
    if (!(o.ratio > 0.0 && o.ratio < 1.0)) {
        throw UsageError("--ratio must lie strictly between 0 and 1");
    }
    LabeledDataset d = load_dataset(o.dataset);
    if (o.balance) {
        d = undersample_balance(d, o.seed);
    }
    const auto [train, test] = train_test_split(d, o.ratio, o.seed);
    write_dataset(train, o.train_out);
    write_dataset(test, o.test_out);
    out << "train " << train.size() << " / test " << test.size() << "\n";
    return kExitOk;
}

struct FeatureOpts {
    std::string reviews, embeddings, features = "tfidf";
    std::size_t min_df = 1;
};

struct TrainOpts {
    FeatureOpts f;
    std::string dataset, model = "gbdt", out;
    std::uint64_t seed = 0;
    LogregConfig logreg;
    GbdtConfig gbdt;
};

std::vector<TokenStream> streams_for(const Corpus& corpus, const std::vector<std::string>& ids)
{
    const std::vector<TokenStream> all = tokenize_reviews(corpus);
    std::map<std::string, const TokenStream*> by_id;
    for (const TokenStream& s : all) {
        by_id[s.doc_id] = &s;
    }
    std::vector<TokenStream> out;
    std::vector<std::string> missing;
    for (const std::string& id : ids) {
        if (auto it = by_id.find(id); it != by_id.end()) {
            out.push_back(*it->second);
        } else {
            missing.push_back(id);
        }
    }
    if (!missing.empty()) {
        throw DataError(std::to_string(missing.size()) + " dataset id(s) not in the corpus: " + list_ids(missing));
    }
    return out;
}

int cmd_train(const TrainOpts& o, std::ostream& out)
{
    const LabeledDataset d = load_dataset(o.dataset);
    std::vector<std::string> ids;
    std::vector<int> y;
    for (const LabeledItem& i : d.items) {
        ids.push_back(i.review_id);
        y.push_back(i.label);
    }
    FeatureMatrix x;
    if (o.f.features == "tfidf") {
        const std::vector<TokenStream> streams = streams_for(load_reviews(o.f.reviews), ids);
        x = featurize_tfidf(streams, build_vocabulary(streams, o.f.min_df));
    } else if (o.f.features == "embedding") {
        x = featurize_embedding(load_embeddings(o.f.embeddings), ids);
    } else {
        throw UsageError("--features must be tfidf or embedding");
    }
    ClassifierModel m;
    if (o.model == "logreg") {
        LogregConfig c = o.logreg;
        c.seed = o.seed;
        m = train_logreg(x, y, c);
    } else if (o.model == "gbdt") {
        GbdtConfig c = o.gbdt;
        c.seed = o.seed;
        m = train_gbdt(x, y, c);
    } else {
        throw UsageError("--model must be logreg or gbdt");
    }
    save_model(m, o.out);
    const EvalReport fit = evaluate(predict(m, x).labels, y);
    out << "trained " << o.model << " on " << ids.size() << " items, " << x.space.size()
        << " features; training F1 " << fmt(fit.f1, 4) << "\n";
    return kExitOk;
}

struct ClassifyOpts {
    std::string model, reviews, embeddings, dataset, out;
};

int cmd_classify(const ClassifyOpts& o, std::ostream& out)
{
    const ClassifierModel m = load_model(o.model);
    std::vector<std::string> ids;
    if (!o.dataset.empty()) {
        for (const LabeledItem& i : load_dataset(o.dataset).items) {
            ids.push_back(i.review_id);
        }
    }
    FeatureMatrix x;
    if (m.space.kind == FeatureKind::tfidf) {
        const Corpus corpus = load_reviews(o.reviews);
        if (ids.empty()) {
            for (const Review& r : corpus) {
                ids.push_back(r.id);
            }
        }
        x = transform_tfidf(m.space, streams_for(corpus, ids));
    } else {
        if (o.embeddings.empty()) {
            throw UsageError("an embedding model needs --embeddings");
        }
        const EmbeddingSet set = load_embeddings(o.embeddings);
        if (ids.empty()) {
            for (const EmbeddingVector& v : set) {
                if (v.doc_id != kQueryId) {
                    ids.push_back(v.doc_id);
                }
            }
        }
        x = featurize_embedding(set, ids);
    }
    const Predictions p = predict(m, x);
    write_predictions(ids, p, o.out);
    out << "classified " << ids.size() << " reviews, "
        << std::count(p.labels.begin(), p.labels.end(), 1) << " predicted privacy\n";
    return kExitOk;
}

struct EvaluateOpts {
    std::string predictions, truth, out;
    std::vector<std::uint64_t> confusion;
};

int cmd_evaluate(const EvaluateOpts& o, std::ostream& out)
{
    EvalReport r;
    if (!o.confusion.empty()) {
        if (o.confusion.size() != 4) {
            throw UsageError("--confusion expects tp,fp,fn,tn");
        }
        r = report_from_confusion({o.confusion[0], o.confusion[1], o.confusion[2], o.confusion[3]});
    } else {
        if (o.predictions.empty() || o.truth.empty()) {
            throw UsageError("--predictions and --truth are required without --confusion");
        }
        const auto preds = load_predictions(o.predictions);
        const LabeledDataset truth = load_dataset(o.truth);
        std::map<std::string, int> by_id;
        for (const ExternalPrediction& p : preds) {
            by_id[p.id] = p.label;
        }
        std::vector<int> predicted, expected;
        std::vector<std::string> missing;
        for (const LabeledItem& i : truth.items) {
            auto it = by_id.find(i.review_id);
            if (it == by_id.end()) {
                missing.push_back(i.review_id);
                continue;
            }
            predicted.push_back(it->second);
            expected.push_back(i.label);
        }
        if (!missing.empty()) {
            throw DataError(std::to_string(missing.size()) + " labeled id(s) have no prediction: " +
                            list_ids(missing));
        }
        r = evaluate(predicted, expected);
    }
    const std::string text = to_json(r).dump(2) + "\n";
    if (o.out.empty()) {
        out << text;
    } else {
        write_file(o.out, text);
    }
    return kExitOk;
}

// ---- topics ---------------------------------------------------------------------

struct TopicsOpts {
    std::string reviews, embeddings, dataset, out, reduction = "pca", k_sweep;
    std::size_t k = 0, target_dim = 5, dim = 256, min_df = 1, window = 110;
    std::uint64_t seed = 0;
    bool renormalize = false;
    int max_iters = 300;
};

std::string representatives_jsonl(const PctdResult& r, const Corpus& corpus)
{
    std::string out;
    for (std::size_t c = 0; c < r.topics.size(); ++c) {
        for (std::size_t rank = 0; rank < r.topics[c].representative_ids.size(); ++rank) {
            const Review& rev = corpus.at(r.topics[c].representative_ids[rank]);
            out += json{{"cluster", c}, {"rank", rank}, {"id", rev.id}, {"app", rev.app}, {"text", rev.text}}.dump() +
                   "\n";
        }
    }
    return out;
}

int cmd_topics(const TopicsOpts& o, std::ostream& out)
{
    if ((o.k == 0) == o.k_sweep.empty()) {
        throw UsageError("give exactly one of --k and --k-sweep");
    }
    std::size_t lo = o.k, hi = o.k;
    if (!o.k_sweep.empty()) {
        std::tie(lo, hi) = parse_sweep(o.k_sweep);
    }
    const Corpus corpus = select_positive(load_reviews(o.reviews), o.dataset);
    const std::vector<TokenStream> streams = tokenize_reviews(corpus);
    EmbeddingSet set;
    if (o.embeddings.empty()) {
        set = BuiltinEmbedder::fit(streams, o.dim, o.seed, o.min_df).embed_all(streams);
    } else {
        set = load_embeddings(o.embeddings);
        require_embeddings(corpus, set);
    }
    PctdConfig config;
    config.reduction = parse_reduction(o.reduction);
    config.target_dim = o.target_dim;
    config.renormalize_after_reduction = o.renormalize;
    config.kmeans.max_iters = o.max_iters;

    std::string summary = "K,inertia,c_v,diversity\n";
    for (std::size_t k = lo; k <= hi; ++k) {
        const PctdResult r = run_pctd(streams, set, k, o.seed, config);
        char id[64];
        std::snprintf(id, sizeof id, "pctd-k%zu-seed%llu", k, static_cast<unsigned long long>(o.seed));
        const fs::path dir = fs::path(o.out) / id;
        write_pctd_outputs(r, id, dir);
        write_file(dir / "representatives.jsonl", representatives_jsonl(r, corpus));

        std::vector<std::vector<std::string>> lists;
        for (auto& l : r.topic_word_lists()) {
            if (!l.empty()) {
                lists.push_back(std::move(l));
            }
        }
        const CoherenceReport cv = cv_coherence(lists, streams, {o.window, 1e-12});
        const double diversity = topic_diversity(lists);
        summary += std::to_string(k) + "," + fmt(r.assignment.inertia, 6) + "," + fmt(cv.mean, 6) + "," +
                   fmt(diversity, 6) + "\n";
        out << id << ": inertia " << fmt(r.assignment.inertia, 4) << ", C_V " << fmt(cv.mean, 4)
            << ", diversity " << fmt(diversity, 4) << "\n";
    }
    if (!o.k_sweep.empty()) {
        write_file(fs::path(o.out) / "summary.csv", summary);
    }
    return kExitOk;
}

// ---- eval-topics ------------------------------------------------------------------

struct EvalTopicsOpts {
    std::string topics, reviews, out;
    std::size_t window = 110;
    double epsilon = 1e-12;
};

int cmd_eval_topics(const EvalTopicsOpts& o, std::ostream& out)
{
    const std::vector<NamedTopic> topics = load_topics(o.topics);
    std::vector<std::vector<std::string>> lists;
    for (const NamedTopic& t : topics) {
        lists.push_back(t.words);
    }
    const std::vector<TokenStream> streams = tokenize_reviews(load_reviews(o.reviews));
    const CoherenceReport r = cv_coherence(lists, streams, {o.window, o.epsilon});
    const std::string text = coherence_report_json(topics, r, topic_diversity(lists)).dump(2) + "\n";
    if (o.out.empty()) {
        out << text;
    } else {
        write_file(o.out, text);
    }
    return kExitOk;
}

// ---- bootstrap --------------------------------------------------------------------

struct BootstrapOpts {
    std::string reviews, labels, out;
    std::vector<std::string> seeds, approve;
    bool interactive = false;
    BootstrapConfig config;
};

int cmd_bootstrap(const BootstrapOpts& o, std::istream& in, std::ostream& out)
{
    const Corpus corpus = load_reviews(o.reviews);
    const std::vector<TokenStream> docs = tokenize_reviews(corpus);
    std::vector<int> truth;
    if (!o.labels.empty()) {
        const RelevanceJudgments j = load_judgments(o.labels);
        for (const Review& r : corpus) {
            truth.push_back(j.is_relevant(r.id) ? 1 : 0);
        }
    }
    const std::set<std::string> approve(o.approve.begin(), o.approve.end());
    KeywordJudge judge = [&](const KeywordCandidate& c, int iteration) {
        if (!o.interactive) {
            return approve.count(c.keyword) > 0;
        }
        out << "\niteration " << iteration << ": keyword '" << c.keyword << "' (score " << fmt(c.score, 3)
            << ")\n";
        for (const std::string& id : c.sample_ids) {
            out << "  - " << corpus.at(id).text << "\n";
        }
        out << "approve? [y/N] " << std::flush;
        std::string answer;
        return static_cast<bool>(std::getline(in, answer)) && (answer == "y" || answer == "yes");
    };
    const auto history = bootstrap_baseline(docs, truth, o.seeds, judge, o.config);
    json j = json::array();
    for (const BootstrapIteration& it : history) {
        j.push_back(to_json(it));
        out << "iteration " << it.iteration << ": " << it.keywords.size() << " keywords, " << it.positives
            << " positives";
        if (it.report) {
            out << ", F1 " << fmt(it.report->f1, 4);
        }
        out << "\n";
    }
    if (!o.out.empty()) {
        write_file(o.out, j.dump(2) + "\n");
    }
    return kExitOk;
}

// ---- synth ---------------------------------------------------------------------------

struct SynthOpts {
    std::string out;
    std::uint64_t seed = 0;
    std::size_t per_topic = 40, distractors = 2000;
};

int cmd_synth(const SynthOpts& o, std::ostream& out)
{
    const fs::path dir = o.out;
    const SyntheticCorpus s = make_synthetic_corpus(o.seed, o.per_topic, o.distractors);
    write_reviews(s.reviews, dir / "reviews.jsonl");
    write_file(dir / "policy.md", s.policy);
    write_labels(s.labels, dir / "labels.jsonl");
    const BootstrapFixture b = make_bootstrap_fixture(o.seed);
    write_reviews(b.reviews, dir / "bootstrap_reviews.jsonl");
    write_labels(b.labels, dir / "bootstrap_labels.jsonl");
    out << "wrote " << s.reviews.size() << " reviews and " << b.reviews.size() << " bootstrap reviews to "
        << dir.string() << "\n";
    return kExitOk;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err)
{
    CLI::App app{"privminer: mine privacy reviews and privacy concern topics from app reviews"};
    app.set_config("--config", "", "Read options from a key=value (TOML/INI) file");
    app.require_subcommand(1);
    int rc = kExitOk;

    EmbedOpts embed;
    auto* c_embed = app.add_subcommand("embed", "Embed reviews (and optionally a policy query) with the built-in embedder");
    c_embed->add_option("--reviews", embed.reviews, "Reviews JSONL")->required();
    c_embed->add_option("--policy", embed.policy, "Policy text; adds a vector with id __query__");
    c_embed->add_option("--exclude", embed.exclude, "Heading globs to drop from the policy");
    c_embed->add_option("--out", embed.out, "Output embeddings JSONL")->required();
    c_embed->add_option("--dim", embed.dim, "Embedding dimension")->check(CLI::PositiveNumber);
    c_embed->add_option("--seed", embed.seed, "Projection seed");
    c_embed->add_option("--min-df", embed.min_df, "Minimum document frequency")->check(CLI::PositiveNumber);
    c_embed->callback([&] { rc = cmd_embed(embed, out); });

    RetrieveOpts retrieve;
    auto* c_ret = app.add_subcommand("retrieve", "Rank reviews by cosine similarity to the policy");
    c_ret->add_option("--policy", retrieve.policy, "Policy text");
    c_ret->add_option("--reviews", retrieve.reviews, "Reviews JSONL")->required();
    c_ret->add_option("--embeddings", retrieve.embeddings, "Precomputed embeddings incl. the query vector");
    c_ret->add_option("--query-id", retrieve.query_id, "Id of the query vector");
    c_ret->add_option("--exclude", retrieve.exclude, "Heading globs to drop from the policy");
    c_ret->add_option("--top-m", retrieve.top_m, "Number of candidates to keep");
    c_ret->add_option("--judgments", retrieve.judgments, "Optional {id,label} JSONL for metrics");
    c_ret->add_option("--dim", retrieve.dim, "Built-in embedder dimension")->check(CLI::PositiveNumber);
    c_ret->add_option("--min-df", retrieve.min_df, "Built-in embedder min df")->check(CLI::PositiveNumber);
    c_ret->add_option("--seed", retrieve.seed, "Built-in embedder seed");
    c_ret->add_option("--out", retrieve.out, "Output directory")->required();
    c_ret->callback([&] { rc = cmd_retrieve(retrieve, out, err); });

    EvalRetrievalOpts evr;
    auto* c_evr = app.add_subcommand("eval-retrieval", "P@k, R@k, F1@k and AP of a ranked list");
    c_evr->add_option("--ranked", evr.ranked, "Ranked CSV")->required();
    c_evr->add_option("--judgments", evr.judgments, "{id,label} JSONL")->required();
    c_evr->add_option("--k", evr.ks, "Cutoffs (repeatable)");
    c_evr->add_option("--k-max", evr.k_max, "Also report the F1 curve up to this cutoff");
    c_evr->add_option("--out", evr.out, "Write the report here instead of stdout");
    c_evr->callback([&] { rc = cmd_eval_retrieval(evr, out); });

    AnnotateOpts ann;
    auto* c_ann = app.add_subcommand("annotate", "Annotation sessions");
    c_ann->require_subcommand(1);
    c_ann->add_option("--store", ann.store, "Session directory (default $PRIVMINER_DATA_DIR/sessions)");
    auto* a_create = c_ann->add_subcommand("create", "Create a session from a ranked list");
    a_create->add_option("--id", ann.id, "Session id")->required();
    a_create->add_option("--ranked", ann.ranked, "Ranked CSV")->required();
    a_create->add_option("--reviews", ann.reviews, "Reviews JSONL for candidate text");
    a_create->add_option("--top-m", ann.top_m, "Keep only the first M candidates");
    a_create->add_option("--annotators", ann.annotators, "Annotator names")->required()->delimiter(',');
    a_create->callback([&] { rc = cmd_annotate_create(ann, out); });
    auto* a_label = c_ann->add_subcommand("label", "Label one review, or label interactively");
    a_label->add_option("--id", ann.id, "Session id")->required();
    a_label->add_option("--annotator", ann.annotator, "Annotator name")->required();
    auto* o_review = a_label->add_option("--review", ann.review, "Review id (omit for interactive mode)");
    a_label->add_option("--label", ann.label, "1, 0 or skip")->needs(o_review);
    a_label->callback([&] {
        if (!ann.review.empty() && ann.label.empty()) {
            throw UsageError("--review needs --label");
        }
        rc = cmd_annotate_label(ann, in, out);
    });
    auto* a_agree = c_ann->add_subcommand("agreement", "Cohen's kappa of the first two annotators");
    a_agree->add_option("--id", ann.id, "Session id")->required();
    a_agree->callback([&] { rc = cmd_annotate_agreement(ann, out); });
    auto* a_export = c_ann->add_subcommand("export", "Adjudicate and write the labeled dataset");
    a_export->add_option("--id", ann.id, "Session id")->required();
    a_export->add_option("--resolve", ann.resolve, "JSONL {id,label|null} resolving disagreements");
    a_export->add_option("--out", ann.out, "Dataset JSONL")->required();
    a_export->callback([&] { rc = cmd_annotate_export(ann, out); });

    SplitOpts split;
    auto* c_split = app.add_subcommand("split", "Balance and split a labeled dataset");
    c_split->add_option("--dataset", split.dataset, "Dataset JSONL")->required();
    c_split->add_flag("--balance", split.balance, "Undersample the majority class first");
    c_split->add_option("--ratio", split.ratio, "Training fraction");
    c_split->add_option("--seed", split.seed, "Seed");
    c_split->add_option("--train-out", split.train_out, "Training JSONL")->required();
    c_split->add_option("--test-out", split.test_out, "Test JSONL")->required();
    c_split->callback([&] { rc = cmd_split(split, out); });

    TrainOpts train;
    auto* c_train = app.add_subcommand("train", "Train a classifier");
    c_train->add_option("--dataset", train.dataset, "Training dataset JSONL")->required();
    c_train->add_option("--reviews", train.f.reviews, "Reviews JSONL (tfidf features)");
    c_train->add_option("--embeddings", train.f.embeddings, "Embeddings JSONL (embedding features)");
    c_train->add_option("--features", train.f.features, "tfidf or embedding");
    c_train->add_option("--min-df", train.f.min_df, "Vocabulary min df")->check(CLI::PositiveNumber);
    c_train->add_option("--model", train.model, "logreg or gbdt");
    c_train->add_option("--seed", train.seed, "Seed");
    c_train->add_option("--epochs", train.logreg.epochs, "logreg epochs");
    c_train->add_option("--l2", train.logreg.l2, "logreg L2 penalty");
    c_train->add_option("--trees", train.gbdt.trees, "GBDT trees");
    c_train->add_option("--depth", train.gbdt.depth, "GBDT depth");
    c_train->add_option("--learning-rate", train.gbdt.lr, "GBDT shrinkage");
    c_train->add_option("--out", train.out, "Model JSON")->required();
    c_train->callback([&] { rc = cmd_train(train, out); });

    ClassifyOpts cls;
    auto* c_cls = app.add_subcommand("classify", "Predict privacy labels");
    c_cls->add_option("--model", cls.model, "Model JSON")->required();
    c_cls->add_option("--reviews", cls.reviews, "Reviews JSONL");
    c_cls->add_option("--embeddings", cls.embeddings, "Embeddings JSONL");
    c_cls->add_option("--dataset", cls.dataset, "Restrict to these ids");
    c_cls->add_option("--out", cls.out, "Predictions JSONL")->required();
    c_cls->callback([&] { rc = cmd_classify(cls, out); });

    EvaluateOpts ev;
    auto* c_ev = app.add_subcommand("evaluate", "Precision, recall and F1 of predictions");
    c_ev->add_option("--predictions", ev.predictions, "Predictions JSONL {id,label,prob}");
    c_ev->add_option("--truth", ev.truth, "Dataset JSONL");
    c_ev->add_option("--confusion", ev.confusion, "tp,fp,fn,tn instead of files")->delimiter(',');
    c_ev->add_option("--out", ev.out, "Write the report here instead of stdout");
    c_ev->callback([&] { rc = cmd_evaluate(ev, out); });

    TopicsOpts topics;
    auto* c_top = app.add_subcommand("topics", "Detect privacy concern topics");
    c_top->add_option("--reviews", topics.reviews, "Reviews JSONL")->required();
    c_top->add_option("--dataset", topics.dataset, "Keep only reviews labeled 1 here");
    c_top->add_option("--embeddings", topics.embeddings, "Embeddings JSONL (default: built-in embedder)");
    c_top->add_option("--k", topics.k, "Number of topics");
    c_top->add_option("--k-sweep", topics.k_sweep, "Range LO..HI, e.g. 2..10");
    c_top->add_option("--seed", topics.seed, "Seed");
    c_top->add_option("--reduction", topics.reduction, "pca or none");
    c_top->add_option("--target-dim", topics.target_dim, "Reduced dimension")->check(CLI::PositiveNumber);
    c_top->add_flag("--renormalize", topics.renormalize, "Re-normalize after reduction");
    c_top->add_option("--max-iters", topics.max_iters, "Lloyd iteration cap")->check(CLI::PositiveNumber);
    c_top->add_option("--dim", topics.dim, "Built-in embedder dimension")->check(CLI::PositiveNumber);
    c_top->add_option("--window", topics.window, "C_V window size")->check(CLI::PositiveNumber);
    c_top->add_option("--out", topics.out, "Runs directory")->required();
    c_top->callback([&] { rc = cmd_topics(topics, out); });

    EvalTopicsOpts evt;
    auto* c_evt = app.add_subcommand("eval-topics", "C_V coherence and diversity of topic word lists");
    c_evt->add_option("--topics", evt.topics, "JSON [{name, words}]")->required();
    c_evt->add_option("--reviews", evt.reviews, "Reference corpus JSONL")->required();
    c_evt->add_option("--window", evt.window, "Window size")->check(CLI::PositiveNumber);
    c_evt->add_option("--epsilon", evt.epsilon, "NPMI smoothing");
    c_evt->add_option("--out", evt.out, "Write the report here instead of stdout");
    c_evt->callback([&] { rc = cmd_eval_topics(evt, out); });

    BootstrapOpts boot;
    auto* c_boot = app.add_subcommand("bootstrap", "Keyword bootstrapping baseline");
    c_boot->add_option("--reviews", boot.reviews, "Reviews JSONL")->required();
    c_boot->add_option("--labels", boot.labels, "{id,label} JSONL for F1 per iteration");
    c_boot->add_option("--seed-keywords", boot.seeds, "Initial keywords")->required()->delimiter(',');
    c_boot->add_option("--approve", boot.approve, "Scripted judge: approve exactly these")->delimiter(',');
    c_boot->add_flag("--interactive", boot.interactive, "Ask for each keyword on the terminal");
    c_boot->add_option("--max-iters", boot.config.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
    c_boot->add_option("--candidates", boot.config.candidates_per_iter, "Proposals per iteration")
        ->check(CLI::PositiveNumber);
    c_boot->add_option("--out", boot.out, "History JSON");
    c_boot->callback([&] { rc = cmd_bootstrap(boot, in, out); });

    SynthOpts synth;
    auto* c_synth = app.add_subcommand("synth", "Write the planted evaluation corpora");
    c_synth->add_option("--out", synth.out, "Output directory")->required();
    c_synth->add_option("--seed", synth.seed, "Seed");
    c_synth->add_option("--per-topic", synth.per_topic, "Privacy reviews per topic")->check(CLI::PositiveNumber);
    c_synth->add_option("--distractors", synth.distractors, "Non-privacy reviews");
    c_synth->callback([&] { rc = cmd_synth(synth, out); });

    std::string host = "127.0.0.1", data_dir, ui_dir;
    int port = 8080;
    auto* c_serve = app.add_subcommand("serve", "Run the local HTTP API");
    c_serve->add_option("--host", host, "Bind address");
    c_serve->add_option("--port", port, "Port")->check(CLI::Range(1, 65535));
    c_serve->add_option("--data-dir", data_dir, "Data directory (default $PRIVMINER_DATA_DIR or ./privminer-data)");
    c_serve->add_option("--ui-dir", ui_dir, "Static web UI bundle to serve at /");
    c_serve->callback([&] {
        ServiceConfig config;
        config.data_dir = data_dir.empty() ? resolve_data_dir("privminer-data") : fs::path(data_dir);
        fs::create_directories(config.data_dir);
        if (!ui_dir.empty()) {
            config.ui_dir = ui_dir;
        }
        rc = serve(config, host, port);
    });

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NotFoundError& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    } catch (const json::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitData;
    }
    return rc;
}

} // namespace privminer
