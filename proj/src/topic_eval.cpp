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

#include "privminer/topic_eval.hpp"

#include "privminer/error.hpp"
#include "privminer/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace privminer {

std::vector<std::vector<std::string>> sliding_windows(const TokenStream& stream, std::size_t size)
{
    if (size < 1) {
        throw UsageError("window size must be at least 1");
    }
    std::vector<std::vector<std::string>> out;
    const auto& t = stream.tokens;
    if (t.empty()) {
        return out;
    }
    if (t.size() <= size) {
        out.push_back(t);
        return out;
    }
    for (std::size_t start = 0; start + size <= t.size(); ++start) {
        out.emplace_back(t.begin() + static_cast<std::ptrdiff_t>(start),
                         t.begin() + static_cast<std::ptrdiff_t>(start + size));
    }
    return out;
}

std::uint64_t WindowStats::count(const std::string& w) const
{
    const auto it = index.find(w);
    if (it == index.end()) {
        throw DataError("word '" + w + "' is not tracked");
    }
    return single[it->second];
}

std::uint64_t WindowStats::count(const std::string& a, const std::string& b) const
{
    const auto ia = index.find(a);
    const auto ib = index.find(b);
    if (ia == index.end() || ib == index.end()) {
        throw DataError("word '" + (ia == index.end() ? a : b) + "' is not tracked");
    }
    return pair[ia->second * words.size() + ib->second];
}

WindowStats window_stats(const std::vector<TokenStream>& corpus, const std::vector<std::string>& words,
                         std::size_t window_size)
{
    if (window_size < 1) {
        throw UsageError("window size must be at least 1");
    }
    WindowStats stats;
    stats.window_size = window_size;
    const std::set<std::string> unique(words.begin(), words.end());
    stats.words.assign(unique.begin(), unique.end());
    for (std::size_t i = 0; i < stats.words.size(); ++i) {
        stats.index.emplace(stats.words[i], i);
    }
    std::vector<std::vector<int>> docs;
    docs.reserve(corpus.size());
    for (const TokenStream& s : corpus) {
        std::vector<int> ids;
        ids.reserve(s.tokens.size());
        for (const std::string& t : s.tokens) {
            const auto it = stats.index.find(t);
            ids.push_back(it == stats.index.end() ? -1 : static_cast<int>(it->second));
        }
        docs.push_back(std::move(ids));
    }
    kernels::WindowCounts counts = kernels::window_counts(docs, stats.words.size(), window_size);
    stats.total_windows = counts.total_windows;
    stats.single = std::move(counts.single);
    stats.pair = std::move(counts.pair);
    return stats;
}

double npmi(const WindowStats& stats, const std::string& a, const std::string& b, double eps)
{
    const std::uint64_t ca = stats.count(a);
    const std::uint64_t cb = stats.count(b);
    if (ca == 0 || cb == 0) {
        throw DataError("word '" + (ca == 0 ? a : b) + "' does not occur in any window");
    }
    const double n = static_cast<double>(stats.total_windows);
    const double pa = static_cast<double>(ca) / n;
    const double pb = static_cast<double>(cb) / n;
    const double pab = a == b ? pa : static_cast<double>(stats.count(a, b)) / n;
    return std::log((pab + eps) / (pa * pb)) / -std::log(pab + eps);
}

namespace {

double cosine_or_zero(const std::vector<double>& x, const std::vector<double>& y)
{
    double xy = 0.0, xx = 0.0, yy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        xy += x[i] * y[i];
        xx += x[i] * x[i];
        yy += y[i] * y[i];
    }
    if (xx == 0.0 || yy == 0.0) {
        return 0.0;
    }
    return xy / (std::sqrt(xx) * std::sqrt(yy));
}

} // namespace

CoherenceReport cv_coherence(const std::vector<std::vector<std::string>>& topics,
                             const std::vector<TokenStream>& corpus, const CoherenceConfig& config)
{
    if (topics.empty()) {
        throw DataError("no topics to score");
    }
    std::vector<std::string> all;
    for (std::size_t t = 0; t < topics.size(); ++t) {
        if (topics[t].empty()) {
            throw DataError("topic " + std::to_string(t) + " has no words");
        }
        all.insert(all.end(), topics[t].begin(), topics[t].end());
    }
    const WindowStats stats = window_stats(corpus, all, config.window_size);

    std::string missing;
    for (std::size_t t = 0; t < topics.size(); ++t) {
        std::string words;
        for (const std::string& w : topics[t]) {
            if (stats.count(w) == 0) {
                words += (words.empty() ? "" : ", ") + w;
            }
        }
        if (!words.empty()) {
            missing += (missing.empty() ? "" : "; ") + ("topic " + std::to_string(t) + ": " + words);
        }
    }
    if (!missing.empty()) {
        throw DataError("topic words absent from the corpus (" + missing + ")");
    }

    CoherenceReport report;
    report.config = config;
    for (const auto& topic : topics) {
        const std::size_t n = topic.size();
        std::vector<std::vector<double>> ctx(n, std::vector<double>(n));
        std::vector<double> total(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                ctx[i][j] = npmi(stats, topic[i], topic[j], config.epsilon);
                total[j] += ctx[i][j];
            }
        }
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            sum += cosine_or_zero(ctx[i], total);
        }
        report.per_topic.push_back(std::clamp(sum / static_cast<double>(n), 0.0, 1.0));
    }
    double s = 0.0;
    for (double v : report.per_topic) {
        s += v;
    }
    report.mean = s / static_cast<double>(report.per_topic.size());
    return report;
}

double topic_diversity(const std::vector<std::vector<std::string>>& topics)
{
    if (topics.empty()) {
        throw DataError("no topics");
    }
    std::set<std::string> unique;
    std::size_t slots = 0;
    for (std::size_t t = 0; t < topics.size(); ++t) {
        if (topics[t].empty()) {
            throw DataError("topic " + std::to_string(t) + " has no words");
        }
        unique.insert(topics[t].begin(), topics[t].end());
        slots += topics[t].size();
    }
    return static_cast<double>(unique.size()) / static_cast<double>(slots);
}

std::vector<NamedTopic> load_topics(const std::filesystem::path& path)
{
    json j;
    try {
        j = json::parse(read_file(path));
    } catch (const json::parse_error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
    if (!j.is_array()) {
        throw DataError(path.string() + ": expected a JSON array of topics");
    }
    std::vector<NamedTopic> out;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const json& t = j[i];
        if (!t.is_object() || !t.contains("words") || !t["words"].is_array()) {
            throw DataError(path.string() + ": topic " + std::to_string(i) + " needs a \"words\" array");
        }
        NamedTopic nt;
        nt.name = t.value("name", "topic" + std::to_string(i));
        try {
            nt.words = t["words"].get<std::vector<std::string>>();
        } catch (const json::exception&) {
            throw DataError(path.string() + ": topic " + std::to_string(i) + " words must be strings");
        }
        out.push_back(std::move(nt));
    }
    return out;
}

json topics_to_json(const std::vector<NamedTopic>& topics)
{
    json out = json::array();
    for (const NamedTopic& t : topics) {
        out.push_back({{"name", t.name}, {"words", t.words}});
    }
    return out;
}

json coherence_report_json(const std::vector<NamedTopic>& topics, const CoherenceReport& report,
                           double diversity)
{
    json per = json::array();
    for (std::size_t i = 0; i < topics.size() && i < report.per_topic.size(); ++i) {
        per.push_back({{"name", topics[i].name}, {"c_v", report.per_topic[i]}});
    }
    return {{"config", {{"window_size", report.config.window_size}, {"epsilon", report.config.epsilon}}},
            {"topics", per},
            {"mean_c_v", report.mean},
            {"diversity", diversity}};
}

} // namespace privminer
