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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace privminer {

struct EmbeddingVector {
    std::string doc_id;
    std::vector<double> values;
    /// Set by the built-in embedder when no token was in vocabulary; the
    /// vector is all zeros and is skipped by ranking.
    bool degenerate = false;
};

/// Vectors of a common dimension keyed by document id, kept in insertion
/// order. Immutable once built.
class EmbeddingSet {
public:
    EmbeddingSet() = default;
    EmbeddingSet(std::size_t dim, std::string model_name);

    std::size_t dim() const { return dim_; }
    const std::string& model_name() const { return model_name_; }
    std::size_t size() const { return vectors_.size(); }
    bool empty() const { return vectors_.empty(); }

    /// Throws DataError on wrong length, non-finite values or a duplicate id.
    void insert(EmbeddingVector v);

    const EmbeddingVector* find(std::string_view id) const;
    const EmbeddingVector& at(std::string_view id) const;
    const std::vector<EmbeddingVector>& vectors() const { return vectors_; }

    auto begin() const { return vectors_.begin(); }
    auto end() const { return vectors_.end(); }

private:
    std::size_t dim_ = 0;
    std::string model_name_;
    std::vector<EmbeddingVector> vectors_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Line 1: {"dim","count","model"}; then one {"id","vector"} per line.
EmbeddingSet load_embeddings(const std::filesystem::path& path);
void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path);

/// Throws DataError("cannot normalize zero vector") for an all-zero input.
std::vector<double> l2_normalize(std::span<const double> v);
EmbeddingVector l2_normalize(const EmbeddingVector& v);

double l2_norm(std::span<const double> v);
double dot(std::span<const double> a, std::span<const double> b);

/// Cosine similarity clamped to [-1, 1]. Throws DataError on a zero
/// operand or mismatched dimensions.
double cosine_similarity(std::span<const double> a, std::span<const double> b);
double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

/// Deterministic fallback embedder: TF-IDF weights over a vocabulary
/// followed by a signed random projection whose +-1 entries are derived
/// from (seed, term hash). No external model is needed.
class BuiltinEmbedder {
public:
    BuiltinEmbedder(Vocabulary vocab, DocumentFrequencies stats, std::size_t dim,
                    std::uint64_t seed);

    /// Fits vocabulary (min_df) and document frequencies on `streams`.
    static BuiltinEmbedder fit(const std::vector<TokenStream>& streams, std::size_t dim,
                               std::uint64_t seed, std::size_t min_df = 1);

    EmbeddingVector embed(const TokenStream& stream) const;
    EmbeddingSet embed_all(const std::vector<TokenStream>& streams) const;

    std::size_t dim() const { return dim_; }
    std::string model_name() const;
    const Vocabulary& vocabulary() const { return vocab_; }

private:
    Vocabulary vocab_;
    DocumentFrequencies stats_;
    std::size_t dim_;
    std::uint64_t seed_;
    std::vector<std::uint64_t> term_keys_;
};

EmbeddingVector embed_builtin(const TokenStream& stream, const Vocabulary& vocab,
                              const DocumentFrequencies& stats, std::size_t dim,
                              std::uint64_t seed);

} // namespace privminer
