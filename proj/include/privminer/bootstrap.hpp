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

#include "privminer/classify.hpp"
#include "privminer/corpus.hpp"

#include <functional>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace privminer {

struct BootstrapConfig {
    int max_iters = 10;
    std::size_t candidates_per_iter = 5;
    std::size_t sample_reviews = 3;
};

struct KeywordCandidate {
    std::string keyword;
    double score = 0.0;
    std::vector<std::string> sample_ids;   // newly positive reviews containing it
};

struct BootstrapIteration {
    int iteration = 0;                      // 1-based
    std::vector<std::string> keywords;      // sorted, in force for this iteration
    std::vector<int> predicted;             // per document, input order
    std::size_t positives = 0;
    std::size_t newly_positive = 0;
    std::optional<EvalReport> report;       // when truth labels were given
    std::vector<KeywordCandidate> candidates;
    std::vector<std::string> approved;
    std::vector<std::string> rejected;
};

/// Iterative keyword bootstrapping as a state machine: each iteration marks
/// documents containing any keyword as positive, proposes the top new words
/// of the newly positive documents (c-TF-IDF against the rest), and waits
/// for a decision on every proposal. The run ends when an iteration yields
/// no proposals, none is approved, or max_iters is reached.
class BootstrapRun {
public:
    /// `truth` is empty or parallels `docs`. Throws DataError on an empty
    /// seed set.
    BootstrapRun(std::vector<TokenStream> docs, std::vector<int> truth,
                 const std::vector<std::string>& seed_keywords, BootstrapConfig config = {});

    /// Proposals of the current iteration still awaiting a decision.
    std::vector<KeywordCandidate> pending() const;
    /// Throws NotFoundError if `keyword` is not pending.
    void decide(const std::string& keyword, bool approved);

    bool finished() const { return finished_; }
    const std::vector<BootstrapIteration>& history() const { return history_; }
    const std::set<std::string>& keywords() const { return keywords_; }
    const std::vector<TokenStream>& docs() const { return docs_; }

private:
    void run_iteration();
    void close_iteration();

    std::vector<TokenStream> docs_;
    std::vector<std::set<std::string>> doc_words_;
    std::vector<int> truth_;
    BootstrapConfig config_;
    std::set<std::string> keywords_;
    std::set<std::string> rejected_;
    std::set<std::string> proposed_;
    std::vector<int> previous_;
    std::vector<BootstrapIteration> history_;
    bool finished_ = false;
};

/// Judge callback: (candidate, iteration) -> approve?
using KeywordJudge = std::function<bool(const KeywordCandidate&, int)>;

std::vector<BootstrapIteration> bootstrap_baseline(const std::vector<TokenStream>& docs,
                                                   const std::vector<int>& truth,
                                                   const std::vector<std::string>& seed_keywords,
                                                   const KeywordJudge& judge,
                                                   const BootstrapConfig& config = {});

json to_json(const BootstrapIteration& it);

} // namespace privminer
