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

// Planted corpora with known structure, used by the acceptance suite, the
// tests and `privminer synth`.

#include "privminer/corpus.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace privminer {

/// One signature word per planted privacy topic group.
inline const std::array<std::string, 5> kTopicSignatures = {"sell", "hacked", "backup", "tracking",
                                                            "settings"};

using LabelList = std::vector<std::pair<std::string, int>>;

struct SyntheticCorpus {
    Corpus reviews;                     // shuffled; ids r00000...
    std::string policy;                 // markdown with boilerplate sections
    LabelList labels;                   // privacy = 1, in review order
    std::map<std::string, int> topic_of;   // privacy review id -> group index
};

/// `per_topic` privacy reviews for each of the 5 groups plus `distractors`
/// ordinary reviews with disjoint vocabulary.
SyntheticCorpus make_synthetic_corpus(std::uint64_t seed, std::size_t per_topic = 40,
                                      std::size_t distractors = 2000);

/// Keyword bootstrapping fixture. 40 positives say `seed`, 20 say both
/// `seed` and `bridge`, 40 say only `bridge` (half of these also `poison`);
/// 200 negatives, half of which contain `poison`.
struct BootstrapFixture {
    Corpus reviews;
    LabelList labels;
    std::string seed = "privacy";
    std::string bridge = "tracking";
    std::string poison = "update";
};

BootstrapFixture make_bootstrap_fixture(std::uint64_t seed);

/// JSONL of {"id","label"}.
void write_labels(const LabelList& labels, const std::filesystem::path& path);

} // namespace privminer
