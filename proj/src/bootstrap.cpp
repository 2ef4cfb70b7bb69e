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

#include "privminer/bootstrap.hpp"

#include "privminer/error.hpp"
#include "privminer/pctd.hpp"

#include <algorithm>

namespace privminer {

BootstrapRun::BootstrapRun(std::vector<TokenStream> docs, std::vector<int> truth,
                           const std::vector<std::string>& seed_keywords, BootstrapConfig config)
    : docs_(std::move(docs)), truth_(std::move(truth)), config_(config)
{
    if (seed_keywords.empty()) {
        throw DataError("bootstrap needs at least one seed keyword");
    }
    if (!truth_.empty() && truth_.size() != docs_.size()) {
        throw DataError("truth labels and documents differ in length");
    }
    if (config_.max_iters < 1 || config_.candidates_per_iter < 1) {
        throw UsageError("max_iters and candidates per iteration must be at least 1");
    }
    for (const std::string& k : seed_keywords) {
        if (k.empty()) {
            throw DataError("empty seed keyword");
        }
        keywords_.insert(k);
    }
    doc_words_.reserve(docs_.size());
    for (const TokenStream& d : docs_) {
        doc_words_.emplace_back(d.tokens.begin(), d.tokens.end());
    }
    previous_.assign(docs_.size(), 0);
    run_iteration();
}

void BootstrapRun::run_iteration()
{
    BootstrapIteration it;
    it.iteration = static_cast<int>(history_.size()) + 1;
    it.keywords.assign(keywords_.begin(), keywords_.end());
    it.predicted.assign(docs_.size(), 0);

    std::vector<const TokenStream*> fresh, rest;
    std::vector<std::size_t> fresh_index;
    for (std::size_t i = 0; i < docs_.size(); ++i) {
        const bool hit = std::any_of(keywords_.begin(), keywords_.end(),
                                     [&](const std::string& k) { return doc_words_[i].count(k) > 0; });
        it.predicted[i] = hit ? 1 : 0;
        if (hit && previous_[i] == 0) {
            fresh.push_back(&docs_[i]);
            fresh_index.push_back(i);
        } else {
            rest.push_back(&docs_[i]);
        }
    }
    it.positives = static_cast<std::size_t>(std::count(it.predicted.begin(), it.predicted.end(), 1));
    it.newly_positive = fresh.size();
    if (!truth_.empty()) {
        it.report = evaluate(it.predicted, truth_);
    }
    previous_ = it.predicted;

    if (it.iteration < config_.max_iters && !fresh.empty()) {
        const auto scores = ctfidf({fresh, rest});
        std::vector<ScoredWord> ranked;
        for (const auto& [w, s] : scores[0]) {
            if (!keywords_.count(w) && !rejected_.count(w) && !proposed_.count(w)) {
                ranked.push_back({w, s});
            }
        }
        std::stable_sort(ranked.begin(), ranked.end(), [](const ScoredWord& a, const ScoredWord& b) {
            return a.score != b.score ? a.score > b.score : a.word < b.word;
        });
        for (std::size_t r = 0; r < ranked.size() && r < config_.candidates_per_iter; ++r) {
            KeywordCandidate c{ranked[r].word, ranked[r].score, {}};
            for (std::size_t i : fresh_index) {
                if (c.sample_ids.size() >= config_.sample_reviews) {
                    break;
                }
                if (doc_words_[i].count(c.keyword)) {
                    c.sample_ids.push_back(docs_[i].doc_id);
                }
            }
            proposed_.insert(c.keyword);
            it.candidates.push_back(std::move(c));
        }
    }
    history_.push_back(std::move(it));
    if (history_.back().candidates.empty()) {
        finished_ = true;
    }
}

std::vector<KeywordCandidate> BootstrapRun::pending() const
{
    std::vector<KeywordCandidate> out;
    if (finished_) {
        return out;
    }
    const BootstrapIteration& it = history_.back();
    for (const KeywordCandidate& c : it.candidates) {
        const bool decided = std::count(it.approved.begin(), it.approved.end(), c.keyword) ||
                             std::count(it.rejected.begin(), it.rejected.end(), c.keyword);
        if (!decided) {
            out.push_back(c);
        }
    }
    return out;
}

void BootstrapRun::decide(const std::string& keyword, bool approved)
{
    const auto open = pending();
    if (std::none_of(open.begin(), open.end(), [&](const KeywordCandidate& c) { return c.keyword == keyword; })) {
        throw NotFoundError("keyword '" + keyword + "' is not pending");
    }
    BootstrapIteration& it = history_.back();
    (approved ? it.approved : it.rejected).push_back(keyword);
    if (open.size() == 1) {
        close_iteration();
    }
}

void BootstrapRun::close_iteration()
{
    const BootstrapIteration& it = history_.back();
    rejected_.insert(it.rejected.begin(), it.rejected.end());
    if (it.approved.empty()) {
        finished_ = true;
        return;
    }
    keywords_.insert(it.approved.begin(), it.approved.end());
    run_iteration();
}

std::vector<BootstrapIteration> bootstrap_baseline(const std::vector<TokenStream>& docs,
                                                   const std::vector<int>& truth,
                                                   const std::vector<std::string>& seed_keywords,
                                                   const KeywordJudge& judge, const BootstrapConfig& config)
{
    BootstrapRun run(docs, truth, seed_keywords, config);
    while (!run.finished()) {
        const int iteration = run.history().back().iteration;
        for (const KeywordCandidate& c : run.pending()) {
            run.decide(c.keyword, judge(c, iteration));
        }
    }
    return run.history();
}

json to_json(const BootstrapIteration& it)
{
    json candidates = json::array();
    for (const KeywordCandidate& c : it.candidates) {
        candidates.push_back({{"keyword", c.keyword}, {"score", c.score}, {"sample_ids", c.sample_ids}});
    }
    json j = {{"iteration", it.iteration},
              {"keywords", it.keywords},
              {"positives", it.positives},
              {"newly_positive", it.newly_positive},
              {"candidates", candidates},
              {"approved", it.approved},
              {"rejected", it.rejected}};
    if (it.report) {
        j["evaluation"] = to_json(*it.report);
    }
    return j;
}

} // namespace privminer
