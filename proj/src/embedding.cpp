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

#include "privminer/embedding.hpp"

#include "privminer/error.hpp"
#include "privminer/jsonl.hpp"
#include "privminer/random.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace privminer {

EmbeddingSet::EmbeddingSet(std::size_t dim, std::string model_name)
    : dim_(dim), model_name_(std::move(model_name))
{
    if (dim == 0) {
        throw DataError("embedding dimension must be positive");
    }
}

void EmbeddingSet::insert(EmbeddingVector v)
{
    if (v.values.size() != dim_) {
        throw DataError("embedding '" + v.doc_id + "' has length " +
                        std::to_string(v.values.size()) + ", expected " + std::to_string(dim_));
    }
    if (!std::all_of(v.values.begin(), v.values.end(), [](double x) { return std::isfinite(x); })) {
        throw DataError("embedding '" + v.doc_id + "' has non-finite values");
    }
    if (index_.contains(v.doc_id)) {
        throw DataError("duplicate embedding id '" + v.doc_id + "'");
    }
    index_.emplace(v.doc_id, vectors_.size());
    vectors_.push_back(std::move(v));
}

const EmbeddingVector* EmbeddingSet::find(std::string_view id) const
{
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &vectors_[it->second];
}

const EmbeddingVector& EmbeddingSet::at(std::string_view id) const
{
    if (const EmbeddingVector* v = find(id)) {
        return *v;
    }
    throw DataError("no embedding for id '" + std::string(id) + "'");
}

EmbeddingSet load_embeddings(const std::filesystem::path& path)
{
    EmbeddingSet set;
    std::size_t expected = 0;
    bool have_header = false;
    for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        if (!have_header) {
            if (!obj.is_object() || !obj.contains("dim") || !obj["dim"].is_number_unsigned() ||
                !obj.contains("count") || !obj["count"].is_number_unsigned()) {
                throw DataError(path.string() + ": line " + std::to_string(line) +
                                ": expected header {\"dim\",\"count\",\"model\"}");
            }
            set = EmbeddingSet(obj["dim"].get<std::size_t>(), obj.value("model", std::string{}));
            expected = obj["count"].get<std::size_t>();
            have_header = true;
            return;
        }
        if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
            !obj.contains("vector") || !obj["vector"].is_array()) {
            throw DataError(path.string() + ": line " + std::to_string(line) +
                            ": expected {\"id\",\"vector\"}");
        }
        EmbeddingVector v;
        v.doc_id = obj["id"].get<std::string>();
        v.values.reserve(obj["vector"].size());
        for (const json& x : obj["vector"]) {
            if (!x.is_number()) {
                throw DataError("embedding '" + v.doc_id + "' has a non-numeric entry");
            }
            v.values.push_back(x.get<double>());
        }
        if (v.values.size() != set.dim()) {
            throw DataError("embedding '" + v.doc_id + "' (line " + std::to_string(line) +
                            ") has length " + std::to_string(v.values.size()) + ", header dim is " +
                            std::to_string(set.dim()));
        }
        set.insert(std::move(v));
    });
    if (!have_header) {
        throw DataError(path.string() + ": missing embedding header");
    }
    if (set.size() != expected) {
        throw DataError(path.string() + ": header count " + std::to_string(expected) + " but " +
                        std::to_string(set.size()) + " vectors");
    }
    return set;
}

void write_embeddings(const EmbeddingSet& set, const std::filesystem::path& path)
{
    std::string out = json{{"dim", set.dim()}, {"count", set.size()}, {"model", set.model_name()}}.dump();
    out += '\n';
    for (const EmbeddingVector& v : set) {
        out += json{{"id", v.doc_id}, {"vector", v.values}}.dump();
        out += '\n';
    }
    write_file(path, out);
}

double dot(std::span<const double> a, std::span<const double> b)
{
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

double l2_norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

std::vector<double> l2_normalize(std::span<const double> v)
{
    const double n = l2_norm(v);
    if (n == 0.0) {
        throw DataError("cannot normalize zero vector");
    }
    std::vector<double> out(v.begin(), v.end());
    for (double& x : out) {
        x /= n;
    }
    return out;
}

EmbeddingVector l2_normalize(const EmbeddingVector& v)
{
    try {
        return {v.doc_id, l2_normalize(std::span<const double>(v.values)), false};
    } catch (const DataError&) {
        throw DataError("cannot normalize zero vector (id '" + v.doc_id + "')");
    }
}

double cosine_similarity(std::span<const double> a, std::span<const double> b)
{
    if (a.size() != b.size()) {
        throw DataError("cosine similarity of vectors with dimensions " + std::to_string(a.size()) +
                        " and " + std::to_string(b.size()));
    }
    const double na = l2_norm(a);
    const double nb = l2_norm(b);
    if (na == 0.0 || nb == 0.0) {
        throw DataError("cosine similarity with a zero vector");
    }
    return std::clamp(dot(a, b) / (na * nb), -1.0, 1.0);
}

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b)
{
    return cosine_similarity(std::span<const double>(a.values), std::span<const double>(b.values));
}

BuiltinEmbedder::BuiltinEmbedder(Vocabulary vocab, DocumentFrequencies stats, std::size_t dim,
                                 std::uint64_t seed)
    : vocab_(std::move(vocab)), stats_(std::move(stats)), dim_(dim), seed_(seed)
{
    if (dim_ < 2) {
        throw UsageError("built-in embedding dimension must be at least 2");
    }
    if (vocab_.empty()) {
        throw DataError("built-in embedder needs a nonempty vocabulary");
    }
    term_keys_.reserve(vocab_.size());
    for (const std::string& t : vocab_.terms()) {
        term_keys_.push_back(splitmix64(seed_ ^ fnv1a64(t)));
    }
}

BuiltinEmbedder BuiltinEmbedder::fit(const std::vector<TokenStream>& streams, std::size_t dim,
                                     std::uint64_t seed, std::size_t min_df)
{
    return BuiltinEmbedder(build_vocabulary(streams, min_df), document_frequencies(streams), dim,
                           seed);
}

std::string BuiltinEmbedder::model_name() const
{
    return "builtin-tfidf-rp-d" + std::to_string(dim_) + "-s" + std::to_string(seed_);
}

EmbeddingVector BuiltinEmbedder::embed(const TokenStream& stream) const
{
    // Ordered map: the accumulation order is fixed by term index.
    std::map<std::size_t, double> tf;
    for (const std::string& t : stream.tokens) {
        if (auto idx = vocab_.index_of(t)) {
            tf[*idx] += 1.0;
        }
    }
    EmbeddingVector out{stream.doc_id, std::vector<double>(dim_, 0.0), tf.empty()};
    const double n_docs = static_cast<double>(std::max<std::size_t>(stats_.num_docs, 1));
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim_));
    for (const auto& [idx, count] : tf) {
        const double df = static_cast<double>(std::max<std::size_t>(stats_.of(vocab_.terms()[idx]), 1));
        const double weight = count * std::log(1.0 + n_docs / df) * scale;
        const std::uint64_t key = term_keys_[idx];
        std::uint64_t bits = 0;
        for (std::size_t j = 0; j < dim_; ++j) {
            if (j % 64 == 0) {
                bits = splitmix64(key + j / 64);
            }
            out.values[j] += ((bits >> (j % 64)) & 1U) ? weight : -weight;
        }
    }
    return out;
}

EmbeddingSet BuiltinEmbedder::embed_all(const std::vector<TokenStream>& streams) const
{
    std::vector<EmbeddingVector> vecs(streams.size());
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < streams.size(); ++i) {
        vecs[i] = embed(streams[i]);
    }
    EmbeddingSet set(dim_, model_name());
    for (EmbeddingVector& v : vecs) {
        set.insert(std::move(v));
    }
    return set;
}

EmbeddingVector embed_builtin(const TokenStream& stream, const Vocabulary& vocab,
                              const DocumentFrequencies& stats, std::size_t dim,
                              std::uint64_t seed)
{
    return BuiltinEmbedder(vocab, stats, dim, seed).embed(stream);
}

} // namespace privminer
