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

#include <cmath>
#include <cstdio>

namespace privminer {

const char* to_string(FeatureKind kind)
{
    return kind == FeatureKind::tfidf ? "tfidf" : "embedding";
}

std::string FeatureSpace::hash() const
{
    std::uint64_t h = fnv1a64(to_string(kind));
    h = fnv1a64("\x1f", h);
    h = fnv1a64(model_name, h);
    for (const std::string& n : names) {
        h = fnv1a64("\x1f", h);
        h = fnv1a64(n, h);
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

FeatureSpace fit_tfidf(const std::vector<TokenStream>& streams, const Vocabulary& vocab)
{
    FeatureSpace space;
    space.kind = FeatureKind::tfidf;
    space.names = vocab.terms();
    const DocumentFrequencies dfs = document_frequencies(streams);
    space.idf.reserve(vocab.size());
    for (const std::string& term : vocab.terms()) {
        const std::size_t df = dfs.of(term);
        space.idf.push_back(df == 0 ? 0.0
                                    : std::log(static_cast<double>(dfs.num_docs) / static_cast<double>(df)));
    }
    return space;
}

FeatureMatrix transform_tfidf(const FeatureSpace& space, const std::vector<TokenStream>& streams)
{
    if (space.kind != FeatureKind::tfidf || space.idf.size() != space.names.size()) {
        throw DataError("transform_tfidf needs a TF-IDF feature space");
    }
    const Vocabulary vocab(space.names);
    FeatureMatrix m;
    m.space = space;
    m.values = RowMatrix::Zero(static_cast<Eigen::Index>(streams.size()),
                               static_cast<Eigen::Index>(space.size()));
    m.rows.reserve(streams.size());
    for (const TokenStream& s : streams) {
        m.rows.push_back(s.doc_id);
    }
    std::vector<char> zero(streams.size(), 0);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < static_cast<std::int64_t>(streams.size()); ++i) {
        auto row = m.values.row(i);
        for (const std::string& t : streams[i].tokens) {
            if (auto idx = vocab.index_of(t)) {
                row(static_cast<Eigen::Index>(*idx)) += 1.0;
            }
        }
        double norm2 = 0.0;
        for (Eigen::Index j = 0; j < row.size(); ++j) {
            row(j) *= space.idf[j];
            norm2 += row(j) * row(j);
        }
        if (norm2 > 0.0) {
            row /= std::sqrt(norm2);
        } else {
            zero[i] = 1;
        }
    }
    for (std::size_t i = 0; i < zero.size(); ++i) {
        if (zero[i]) {
            m.zero_rows.push_back(i);
        }
    }
    return m;
}

FeatureMatrix featurize_tfidf(const std::vector<TokenStream>& streams, const Vocabulary& vocab)
{
    return transform_tfidf(fit_tfidf(streams, vocab), streams);
}

FeatureMatrix featurize_embedding(const EmbeddingSet& set, const std::vector<std::string>& ids)
{
    FeatureMatrix m;
    m.space.kind = FeatureKind::embedding;
    m.space.model_name = set.model_name();
    for (std::size_t j = 0; j < set.dim(); ++j) {
        m.space.names.push_back("e" + std::to_string(j));
    }
    m.values.resize(static_cast<Eigen::Index>(ids.size()), static_cast<Eigen::Index>(set.dim()));
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const EmbeddingVector& v = set.at(ids[i]);
        std::copy(v.values.begin(), v.values.end(), m.values.data() + i * set.dim());
        if (v.degenerate || l2_norm(v.values) == 0.0) {
            m.zero_rows.push_back(i);
        }
        m.rows.push_back(ids[i]);
    }
    return m;
}

} // namespace privminer
