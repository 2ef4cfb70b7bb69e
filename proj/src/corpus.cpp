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

#include "privminer/corpus.hpp"

#include "privminer/error.hpp"
#include "privminer/jsonl.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

namespace privminer {

void Corpus::add(Review review)
{
    if (review.id.empty()) {
        throw DataError("review id must be nonempty");
    }
    if (review.text.find_first_not_of(" \t\r\n") == std::string::npos) {
        throw DataError("review '" + review.id + "' has empty text");
    }
    if (index_.contains(review.id)) {
        throw DataError("duplicate review id '" + review.id + "'");
    }
    index_.emplace(review.id, reviews_.size());
    reviews_.push_back(std::move(review));
}

const Review* Corpus::find(std::string_view id) const
{
    auto it = index_.find(std::string(id));
    return it == index_.end() ? nullptr : &reviews_[it->second];
}

const Review& Corpus::at(std::string_view id) const
{
    if (const Review* r = find(id)) {
        return *r;
    }
    throw DataError("unknown review id '" + std::string(id) + "'");
}

namespace {

std::string required_string(const json& obj, const char* key, std::size_t line)
{
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) {
        throw DataError("line " + std::to_string(line) + ": missing string field \"" + key + "\"");
    }
    return it->get<std::string>();
}

std::optional<std::string> optional_string(const json& obj, const char* key, std::size_t line)
{
    auto it = obj.find(key);
    if (it == obj.end() || it->is_null()) {
        return std::nullopt;
    }
    if (!it->is_string()) {
        throw DataError("line " + std::to_string(line) + ": field \"" + key + "\" must be a string");
    }
    return it->get<std::string>();
}

} // namespace

Corpus load_reviews(const std::filesystem::path& path)
{
    Corpus corpus;
    std::unordered_map<std::string, std::size_t> first_line;
    for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        if (!obj.is_object()) {
            throw DataError("line " + std::to_string(line) + ": expected a JSON object");
        }
        Review r;
        r.id = required_string(obj, "id", line);
        r.app = required_string(obj, "app", line);
        r.text = required_string(obj, "text", line);
        r.category = optional_string(obj, "category", line).value_or("");
        r.date = optional_string(obj, "date", line);
        r.region = optional_string(obj, "region", line);
        if (auto it = obj.find("rating"); it != obj.end() && !it->is_null()) {
            if (!it->is_number_integer() || it->get<int>() < 1 || it->get<int>() > 5) {
                throw DataError("line " + std::to_string(line) + ": rating must be an integer 1-5");
            }
            r.rating = it->get<int>();
        }
        if (auto prev = first_line.find(r.id); prev != first_line.end()) {
            throw DataError("duplicate review id '" + r.id + "' on line " + std::to_string(line) +
                            " (first seen on line " + std::to_string(prev->second) + ")");
        }
        first_line.emplace(r.id, line);
        try {
            corpus.add(std::move(r));
        } catch (const DataError& e) {
            throw DataError("line " + std::to_string(line) + ": " + e.what());
        }
    });
    return corpus;
}

void write_reviews(const Corpus& corpus, const std::filesystem::path& path)
{
    std::string out;
    for (const Review& r : corpus) {
        json obj = {{"id", r.id}, {"app", r.app}, {"category", r.category}, {"text", r.text}};
        if (r.rating) {
            obj["rating"] = *r.rating;
        }
        if (r.date) {
            obj["date"] = *r.date;
        }
        if (r.region) {
            obj["region"] = *r.region;
        }
        out += obj.dump();
        out += '\n';
    }
    write_file(path, out);
}

namespace {

std::string ascii_lower(std::string_view s)
{
    std::string out(s);
    for (char& c : out) {
        if (c >= 'A' && c <= 'Z') {
            c = static_cast<char>(c - 'A' + 'a');
        }
    }
    return out;
}

std::string trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

bool heading_excluded(const std::string& heading, const std::vector<std::string>& patterns)
{
    const std::string h = ascii_lower(heading);
    return std::any_of(patterns.begin(), patterns.end(), [&](const std::string& p) {
        return fnmatch(ascii_lower(p).c_str(), h.c_str(), 0) == 0;
    });
}

} // namespace

PolicyDocument parse_policy(std::string_view text, const std::vector<std::string>& exclusions,
                            std::string app)
{
    // Lines keep their terminators so that concatenating every section
    // reproduces the input byte for byte.
    struct Section {
        std::string heading;
        std::string body;
    };
    std::vector<Section> sections(1);
    std::size_t pos = 0;
    while (pos < text.size()) {
        auto nl = text.find('\n', pos);
        const std::size_t end = nl == std::string_view::npos ? text.size() : nl + 1;
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.front() == '#') {
            auto h = line.find_first_not_of('#');
            sections.push_back({trim(h == std::string_view::npos ? "" : line.substr(h)), {}});
        }
        sections.back().body.append(line);
        pos = end;
    }

    PolicyDocument doc;
    doc.app = std::move(app);
    for (const Section& s : sections) {
        if (!s.heading.empty() && heading_excluded(s.heading, exclusions)) {
            doc.excluded_sections.push_back(s.heading);
        } else {
            doc.text += s.body;
        }
    }
    if (trim(doc.text).empty()) {
        throw DataError(doc.excluded_sections.empty() ? "policy is empty" : "policy fully excluded");
    }
    return doc;
}

PolicyDocument load_policy(const std::filesystem::path& path,
                           const std::vector<std::string>& exclusions, std::string app)
{
    return parse_policy(read_file(path), exclusions, std::move(app));
}

namespace {

/// Decodes one UTF-8 sequence at s[i]; invalid bytes decode to 0xFFFFFFFF.
char32_t decode_utf8(std::string_view s, std::size_t& i)
{
    const auto b0 = static_cast<unsigned char>(s[i]);
    int extra = 0;
    char32_t cp = 0;
    if (b0 < 0x80) {
        ++i;
        return b0;
    } else if ((b0 & 0xE0) == 0xC0) {
        extra = 1;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        extra = 2;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        extra = 3;
        cp = b0 & 0x07;
    } else {
        ++i;
        return 0xFFFFFFFF;
    }
    if (i + static_cast<std::size_t>(extra) >= s.size()) {
        ++i;
        return 0xFFFFFFFF;
    }
    for (int k = 1; k <= extra; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) {
            ++i;
            return 0xFFFFFFFF;
        }
        cp = (cp << 6) | (b & 0x3F);
    }
    i += extra + 1;
    return cp;
}

void encode_utf8(char32_t cp, std::string& out)
{
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

// Coarse classification: ASCII exactly, and outside ASCII everything is
// alphanumeric except the punctuation, symbol, emoji and formatting blocks.
bool is_alnum(char32_t cp)
{
    if (cp < 0x80) {
        return (cp >= '0' && cp <= '9') || (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z');
    }
    if (cp == 0xFFFFFFFF || in(cp, 0xD800, 0xDFFF)) {
        return false;
    }
    if (in(cp, 0x80, 0xBF)) {
        return cp == 0xAA || cp == 0xB5 || cp == 0xBA;
    }
    if (cp == 0xD7 || cp == 0xF7) {
        return false;
    }
    return !(in(cp, 0x2000, 0x2BFF) || in(cp, 0x3000, 0x303F) || in(cp, 0xFE00, 0xFE0F) ||
             in(cp, 0xFE10, 0xFE6F) || in(cp, 0xFF00, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) ||
             in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65) || in(cp, 0xFFF0, 0xFFFF) ||
             in(cp, 0x1F000, 0x1FAFF) || in(cp, 0xE0000, 0xE007F));
}

char32_t to_lower(char32_t cp)
{
    if (cp >= 'A' && cp <= 'Z') {
        return cp + 32;
    }
    if (cp < 0xC0) {
        return cp;
    }
    if (in(cp, 0xC0, 0xDE) && cp != 0xD7) {
        return cp + 0x20;
    }
    if (in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) {
        return cp | 1;
    }
    if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) {
        return (cp % 2 == 1) ? cp + 1 : cp;
    }
    if (cp == 0x178) {
        return 0xFF;
    }
    if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) {
        return cp + 0x20;
    }
    if (in(cp, 0x410, 0x42F)) {
        return cp + 0x20;
    }
    if (in(cp, 0x400, 0x40F)) {
        return cp + 0x50;
    }
    return cp;
}

} // namespace

TokenStream tokenize(std::string_view text, const TokenizeConfig& config, std::string doc_id)
{
    TokenStream out;
    out.doc_id = std::move(doc_id);
    std::string current;
    std::size_t current_len = 0;
    auto flush = [&] {
        if (current_len >= config.min_len && current_len > 0 &&
            !(config.remove_stopwords && config.stopwords.contains(current))) {
            out.tokens.push_back(current);
        }
        current.clear();
        current_len = 0;
    };
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = decode_utf8(text, i);
        if (is_alnum(cp)) {
            encode_utf8(to_lower(cp), current);
            ++current_len;
        } else {
            flush();
        }
    }
    flush();
    return out;
}

std::vector<TokenStream> tokenize_corpus(const Corpus& corpus, const TokenizeConfig& config)
{
    std::vector<TokenStream> streams(corpus.size());
    const auto& reviews = corpus.reviews();
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < reviews.size(); ++i) {
        streams[i] = tokenize(reviews[i].text, config, reviews[i].id);
    }
    return streams;
}

std::unordered_set<std::string> load_stopwords(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw DataError("cannot open stopword list " + path.string());
    }
    std::unordered_set<std::string> words;
    std::string line;
    while (std::getline(in, line)) {
        std::string w = trim(line);
        if (!w.empty() && w.front() != '#') {
            words.insert(std::move(w));
        }
    }
    return words;
}

std::filesystem::path default_stopwords_path()
{
    if (const char* env = std::getenv("PRIVMINER_STOPWORDS"); env && *env) {
        return env;
    }
    return std::filesystem::path(PRIVMINER_DATA_DIR) / "stopwords_en.txt";
}

TokenizeConfig default_pipeline_tokenizer()
{
    TokenizeConfig config;
    config.remove_stopwords = true;
    config.stopwords = load_stopwords(default_stopwords_path());
    return config;
}

Vocabulary::Vocabulary(std::vector<std::string> terms) : terms_(std::move(terms))
{
    std::sort(terms_.begin(), terms_.end());
    terms_.erase(std::unique(terms_.begin(), terms_.end()), terms_.end());
    term_to_index_.reserve(terms_.size());
    for (std::size_t i = 0; i < terms_.size(); ++i) {
        term_to_index_.emplace(terms_[i], i);
    }
}

std::optional<std::size_t> Vocabulary::index_of(std::string_view term) const
{
    auto it = term_to_index_.find(std::string(term));
    if (it == term_to_index_.end()) {
        return std::nullopt;
    }
    return it->second;
}

std::size_t DocumentFrequencies::of(std::string_view term) const
{
    auto it = df.find(std::string(term));
    return it == df.end() ? 0 : it->second;
}

DocumentFrequencies document_frequencies(const std::vector<TokenStream>& streams)
{
    DocumentFrequencies out;
    out.num_docs = streams.size();
    for (const TokenStream& s : streams) {
        std::unordered_set<std::string_view> seen(s.tokens.begin(), s.tokens.end());
        for (std::string_view t : seen) {
            ++out.df[std::string(t)];
        }
    }
    return out;
}

Vocabulary build_vocabulary(const std::vector<TokenStream>& streams, std::size_t min_df)
{
    if (min_df < 1) {
        throw UsageError("min_df must be at least 1");
    }
    const DocumentFrequencies dfs = document_frequencies(streams);
    std::vector<std::string> terms;
    for (const auto& [term, count] : dfs.df) {
        if (count >= min_df) {
            terms.push_back(term);
        }
    }
    return Vocabulary(std::move(terms));
}

} // namespace privminer
