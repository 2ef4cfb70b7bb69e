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

#include "privminer/annotation.hpp"

#include "privminer/error.hpp"
#include "privminer/jsonl.hpp"
#include "privminer/random.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <ctime>
#include <set>

namespace privminer {

json to_json(const LabelEvent& e)
{
    return {{"session_id", e.session_id},
            {"review_id", e.review_id},
            {"annotator", e.annotator},
            {"label", e.label ? json(*e.label) : json(nullptr)},
            {"timestamp", e.timestamp},
            {"source", e.source == LabelSource::human ? "human" : "adjudication"}};
}

LabelEvent label_event_from_json(const json& obj)
{
    try {
        LabelEvent e;
        e.session_id = obj.at("session_id").get<std::string>();
        e.review_id = obj.at("review_id").get<std::string>();
        e.annotator = obj.at("annotator").get<std::string>();
        if (!obj.at("label").is_null()) {
            e.label = obj.at("label").get<int>();
            if (*e.label != 0 && *e.label != 1) {
                throw DataError("label must be 0, 1 or null");
            }
        }
        e.timestamp = obj.value("timestamp", std::string{});
        const std::string source = obj.value("source", std::string("human"));
        if (source == "human") {
            e.source = LabelSource::human;
        } else if (source == "adjudication") {
            e.source = LabelSource::adjudication;
        } else {
            throw DataError("unknown label source '" + source + "'");
        }
        return e;
    } catch (const json::exception& ex) {
        throw DataError(std::string("malformed label event: ") + ex.what());
    }
}

const char* to_string(SlotStatus s)
{
    switch (s) {
    case SlotStatus::unlabeled:
        return "unlabeled";
    case SlotStatus::labeled:
        return "labeled";
    case SlotStatus::skipped:
        return "skipped";
    }
    return "unknown";
}

AnnotationSession::AnnotationSession(std::string id, std::vector<Candidate> candidates,
                                     std::vector<std::string> annotators)
    : id_(std::move(id)), candidates_(std::move(candidates)), annotators_(std::move(annotators))
{
    for (std::size_t i = 0; i < candidates_.size(); ++i) {
        if (!candidate_index_.emplace(candidates_[i].id, i).second) {
            throw DataError("duplicate candidate id '" + candidates_[i].id + "'");
        }
    }
    std::set<std::string> seen;
    for (const std::string& a : annotators_) {
        if (a.empty() || !seen.insert(a).second) {
            throw DataError("annotator names must be nonempty and unique");
        }
    }
}

std::vector<std::string> AnnotationSession::candidate_ids() const
{
    std::vector<std::string> ids;
    ids.reserve(candidates_.size());
    for (const Candidate& c : candidates_) {
        ids.push_back(c.id);
    }
    return ids;
}

bool AnnotationSession::has_candidate(std::string_view id) const
{
    return candidate_index_.contains(std::string(id));
}

bool AnnotationSession::has_annotator(std::string_view name) const
{
    return std::find(annotators_.begin(), annotators_.end(), name) != annotators_.end();
}

SlotStatus AnnotationSession::status(std::string_view annotator, std::string_view review_id) const
{
    auto it = slots_.find({std::string(annotator), std::string(review_id)});
    if (it == slots_.end()) {
        return SlotStatus::unlabeled;
    }
    return it->second ? SlotStatus::labeled : SlotStatus::skipped;
}

std::optional<int> AnnotationSession::label(std::string_view annotator, std::string_view review_id) const
{
    auto it = slots_.find({std::string(annotator), std::string(review_id)});
    return it == slots_.end() ? std::nullopt : it->second;
}

std::optional<std::optional<int>> AnnotationSession::resolution(std::string_view review_id) const
{
    auto it = resolutions_.find(std::string(review_id));
    if (it == resolutions_.end()) {
        return std::nullopt;
    }
    return it->second;
}

void AnnotationSession::apply(const LabelEvent& event)
{
    if (event.session_id != id_) {
        throw DataError("event for session '" + event.session_id + "' applied to '" + id_ + "'");
    }
    if (!has_candidate(event.review_id)) {
        throw DataError("review '" + event.review_id + "' is not in session '" + id_ + "'");
    }
    if (event.source == LabelSource::human) {
        if (!has_annotator(event.annotator)) {
            throw DataError("annotator '" + event.annotator + "' is not in session '" + id_ + "'");
        }
        slots_[{event.annotator, event.review_id}] = event.label;
    } else {
        resolutions_[event.review_id] = event.label;
    }
    events_.push_back(event);
}

std::optional<std::string> AnnotationSession::next_unlabeled(std::string_view annotator) const
{
    for (const Candidate& c : candidates_) {
        if (status(annotator, c.id) == SlotStatus::unlabeled) {
            return c.id;
        }
    }
    return std::nullopt;
}

std::map<std::string, std::size_t> AnnotationSession::progress(std::string_view annotator) const
{
    std::map<std::string, std::size_t> counts{{"unlabeled", 0}, {"labeled", 0}, {"skipped", 0}};
    for (const Candidate& c : candidates_) {
        ++counts[to_string(status(annotator, c.id))];
    }
    return counts;
}

AnnotationSession create_session(std::string id, std::vector<Candidate> candidates,
                                 std::vector<std::string> annotators)
{
    if (candidates.empty()) {
        throw DataError("a session needs at least one candidate");
    }
    if (annotators.empty()) {
        throw DataError("a session needs at least one annotator");
    }
    return AnnotationSession(std::move(id), std::move(candidates), std::move(annotators));
}

AnnotationSession create_session(std::string id, const RankedList& candidates,
                                 std::vector<std::string> annotators)
{
    std::vector<Candidate> list;
    list.reserve(candidates.entries.size());
    for (const RankedEntry& e : candidates.entries) {
        list.push_back({e.doc_id, {}, {}});
    }
    return create_session(std::move(id), std::move(list), std::move(annotators));
}

LabelEvent record_label(AnnotationSession& session, std::string_view review_id,
                        std::string_view annotator, std::optional<int> label, std::string timestamp)
{
    if (label && *label != 0 && *label != 1) {
        throw DataError("label must be 0 or 1");
    }
    LabelEvent e{session.id(), std::string(review_id), std::string(annotator), label,
                 std::move(timestamp), LabelSource::human};
    session.apply(e);
    return e;
}

double cohen_kappa(std::uint64_t both_pos, std::uint64_t first_pos, std::uint64_t second_pos,
                   std::uint64_t both_neg)
{
    const double n = static_cast<double>(both_pos + first_pos + second_pos + both_neg);
    if (n == 0.0) {
        throw DataError("kappa undefined: no doubly-labeled items");
    }
    const double p_o = static_cast<double>(both_pos + both_neg) / n;
    const double first_1 = static_cast<double>(both_pos + first_pos) / n;
    const double second_1 = static_cast<double>(both_pos + second_pos) / n;
    const double p_e = first_1 * second_1 + (1.0 - first_1) * (1.0 - second_1);
    if (p_e == 1.0) {
        return p_o == 1.0 ? 1.0 : 0.0;
    }
    return (p_o - p_e) / (1.0 - p_e);
}

double cohen_kappa(const AnnotationSession& session)
{
    if (session.annotators().size() < 2) {
        throw DataError("kappa needs two annotators");
    }
    return cohen_kappa(session, session.annotators()[0], session.annotators()[1]);
}

double cohen_kappa(const AnnotationSession& session, std::string_view first, std::string_view second)
{
    std::uint64_t table[2][2] = {{0, 0}, {0, 0}};
    for (const Candidate& c : session.candidates()) {
        auto a = session.label(first, c.id);
        auto b = session.label(second, c.id);
        if (a && b) {
            ++table[*a][*b];
        }
    }
    return cohen_kappa(table[1][1], table[1][0], table[0][1], table[0][0]);
}

std::size_t LabeledDataset::count(int label) const
{
    return static_cast<std::size_t>(std::count_if(items.begin(), items.end(),
                                                  [label](const LabeledItem& i) { return i.label == label; }));
}

void write_dataset(const LabeledDataset& dataset, const std::filesystem::path& path)
{
    std::string out;
    for (const LabeledItem& item : dataset.items) {
        out += json{{"id", item.review_id}, {"label", item.label}}.dump();
        out += '\n';
    }
    write_file(path, out);
}

LabeledDataset load_dataset(const std::filesystem::path& path)
{
    LabeledDataset d;
    std::set<std::string> seen;
    for_each_jsonl(path, [&](std::size_t line, const json& obj) {
        if (!obj.is_object() || !obj.contains("id") || !obj["id"].is_string() ||
            !obj.contains("label") || !obj["label"].is_number_integer()) {
            throw DataError(path.string() + ": line " + std::to_string(line) +
                            ": expected {\"id\",\"label\"}");
        }
        LabeledItem item{obj["id"].get<std::string>(), obj["label"].get<int>()};
        if (item.label != 0 && item.label != 1) {
            throw DataError(path.string() + ": line " + std::to_string(line) + ": label must be 0 or 1");
        }
        if (!seen.insert(item.review_id).second) {
            throw DataError(path.string() + ": duplicate id '" + item.review_id + "'");
        }
        d.items.push_back(std::move(item));
    });
    d.provenance.push_back(path.string());
    return d;
}

AdjudicationResult adjudicate(AnnotationSession& session,
                              const std::map<std::string, std::optional<int>>& resolutions,
                              const std::string& timestamp)
{
    for (const auto& [id, _] : resolutions) {
        if (!session.has_candidate(id)) {
            throw DataError("resolution for review '" + id + "' not in session");
        }
    }
    const std::size_t required = std::min<std::size_t>(2, session.annotators().size());
    AdjudicationResult result;
    result.dataset.provenance.push_back(session.id());
    std::vector<std::string> unresolved;

    for (const Candidate& c : session.candidates()) {
        std::optional<std::optional<int>> resolved;
        if (auto it = resolutions.find(c.id); it != resolutions.end()) {
            resolved = it->second;
        } else if (auto logged = session.resolution(c.id)) {
            resolved = *logged;
        }
        if (resolved) {
            if (*resolved) {
                result.dataset.items.push_back({c.id, **resolved});
            }
            continue;
        }
        std::set<int> labels;
        std::size_t labeled = 0;
        for (const std::string& a : session.annotators()) {
            if (auto l = session.label(a, c.id)) {
                labels.insert(*l);
                ++labeled;
            }
        }
        if (labels.size() > 1) {
            unresolved.push_back(c.id);
        } else if (labeled >= required) {
            result.dataset.items.push_back({c.id, *labels.begin()});
        }
    }
    if (!unresolved.empty()) {
        std::string msg = "unresolved disagreements:";
        for (const std::string& id : unresolved) {
            msg += ' ' + id;
        }
        throw DataError(msg);
    }
    for (const auto& [id, label] : resolutions) {
        LabelEvent e{session.id(), id, "adjudicator", label, timestamp, LabelSource::adjudication};
        session.apply(e);
        result.events.push_back(std::move(e));
    }
    return result;
}

namespace {

void require_both_classes(const LabeledDataset& d)
{
    if (d.count(0) == 0 || d.count(1) == 0) {
        throw DataError("both classes must be nonempty");
    }
}

} // namespace

LabeledDataset undersample_balance(const LabeledDataset& dataset, std::uint64_t seed)
{
    require_both_classes(dataset);
    const int majority = dataset.count(1) > dataset.count(0) ? 1 : 0;
    const std::size_t target = dataset.count(1 - majority);

    std::vector<std::size_t> majority_idx;
    for (std::size_t i = 0; i < dataset.items.size(); ++i) {
        if (dataset.items[i].label == majority) {
            majority_idx.push_back(i);
        }
    }
    Rng rng(seed);
    rng.shuffle(majority_idx);
    std::vector<bool> keep(dataset.items.size(), false);
    for (std::size_t i = 0; i < dataset.items.size(); ++i) {
        keep[i] = dataset.items[i].label != majority;
    }
    for (std::size_t i = 0; i < target; ++i) {
        keep[majority_idx[i]] = true;
    }
    LabeledDataset out;
    out.provenance = dataset.provenance;
    for (std::size_t i = 0; i < dataset.items.size(); ++i) {
        if (keep[i]) {
            out.items.push_back(dataset.items[i]);
        }
    }
    return out;
}

std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& dataset,
                                                           double train_ratio, std::uint64_t seed)
{
    if (!(train_ratio > 0.0 && train_ratio < 1.0)) {
        throw UsageError("train ratio must lie strictly between 0 and 1");
    }
    if (dataset.items.empty()) {
        throw DataError("cannot split an empty dataset");
    }
    Rng rng(seed);
    std::vector<bool> in_test(dataset.items.size(), false);
    for (int label : {0, 1}) {
        std::vector<std::size_t> idx;
        for (std::size_t i = 0; i < dataset.items.size(); ++i) {
            if (dataset.items[i].label == label) {
                idx.push_back(i);
            }
        }
        const auto n_test = static_cast<std::size_t>(
            std::llround((1.0 - train_ratio) * static_cast<double>(idx.size())));
        if (n_test == 0 || n_test == idx.size()) {
            throw DataError("split leaves class " + std::to_string(label) +
                            " empty in the train or test part");
        }
        rng.shuffle(idx);
        for (std::size_t i = 0; i < n_test; ++i) {
            in_test[idx[i]] = true;
        }
    }
    std::pair<LabeledDataset, LabeledDataset> parts;
    parts.first.provenance = parts.second.provenance = dataset.provenance;
    for (std::size_t i = 0; i < dataset.items.size(); ++i) {
        (in_test[i] ? parts.second : parts.first).items.push_back(dataset.items[i]);
    }
    return parts;
}

namespace {

void check_session_id(std::string_view id)
{
    const bool ok = !id.empty() && id.front() != '.' &&
                    std::all_of(id.begin(), id.end(), [](char c) {
                        return std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.';
                    });
    if (!ok) {
        throw DataError("invalid session id '" + std::string(id) + "'");
    }
}

} // namespace

SessionStore::SessionStore(std::filesystem::path dir) : dir_(std::move(dir))
{
    std::filesystem::create_directories(dir_);
}

std::filesystem::path SessionStore::meta_path(std::string_view id) const
{
    return dir_ / (std::string(id) + ".session.json");
}

std::filesystem::path SessionStore::events_path(std::string_view id) const
{
    return dir_ / (std::string(id) + ".events.jsonl");
}

std::mutex& SessionStore::lock_for(std::string_view id)
{
    std::lock_guard guard(locks_mutex_);
    auto it = locks_.find(id);
    if (it == locks_.end()) {
        it = locks_.emplace(std::string(id), std::make_unique<std::mutex>()).first;
    }
    return *it->second;
}

bool SessionStore::exists(std::string_view id) const
{
    check_session_id(id);
    return std::filesystem::exists(meta_path(id));
}

AnnotationSession SessionStore::create(std::string id, std::vector<Candidate> candidates,
                                       std::vector<std::string> annotators)
{
    check_session_id(id);
    std::lock_guard guard(lock_for(id));
    if (std::filesystem::exists(meta_path(id))) {
        throw DataError("session '" + id + "' already exists");
    }
    AnnotationSession session = create_session(id, std::move(candidates), std::move(annotators));
    json meta = {{"id", session.id()}, {"annotators", session.annotators()}, {"candidates", json::array()}};
    for (const Candidate& c : session.candidates()) {
        meta["candidates"].push_back({{"id", c.id}, {"text", c.text}, {"app", c.app}});
    }
    write_file(meta_path(id), meta.dump(2) + "\n");
    write_file(events_path(id), "");
    return session;
}

AnnotationSession SessionStore::load(std::string_view id) const
{
    check_session_id(id);
    if (!std::filesystem::exists(meta_path(id))) {
        throw NotFoundError("no session '" + std::string(id) + "'");
    }
    json meta;
    try {
        meta = json::parse(read_file(meta_path(id)));
    } catch (const json::exception& e) {
        throw DataError("corrupt session metadata for '" + std::string(id) + "': " + e.what());
    }
    std::vector<Candidate> candidates;
    for (const json& c : meta.at("candidates")) {
        candidates.push_back({c.at("id").get<std::string>(), c.value("text", std::string{}),
                              c.value("app", std::string{})});
    }
    AnnotationSession session(meta.at("id").get<std::string>(), std::move(candidates),
                              meta.at("annotators").get<std::vector<std::string>>());
    if (std::filesystem::exists(events_path(id))) {
        for_each_jsonl(events_path(id), [&](std::size_t, const json& obj) {
            session.apply(label_event_from_json(obj));
        });
    }
    return session;
}

std::vector<std::string> SessionStore::list() const
{
    std::vector<std::string> ids;
    const std::string suffix = ".session.json";
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        const std::string name = entry.path().filename().string();
        if (name.size() > suffix.size() && name.ends_with(suffix)) {
            ids.push_back(name.substr(0, name.size() - suffix.size()));
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

AnnotationSession SessionStore::label(std::string_view id, std::string_view review_id,
                                      std::string_view annotator, std::optional<int> label,
                                      std::string timestamp)
{
    std::lock_guard guard(lock_for(id));
    AnnotationSession session = load(id);
    const SlotStatus current = session.status(annotator, review_id);
    const bool same = label ? (current == SlotStatus::labeled && session.label(annotator, review_id) == label)
                            : current == SlotStatus::skipped;
    if (same && session.has_candidate(review_id) && session.has_annotator(annotator)) {
        return session;
    }
    const LabelEvent e = record_label(session, review_id, annotator, label, std::move(timestamp));
    append_line(events_path(id), to_json(e).dump());
    return session;
}

AdjudicationResult SessionStore::adjudicate(std::string_view id,
                                            const std::map<std::string, std::optional<int>>& resolutions,
                                            const std::string& timestamp)
{
    std::lock_guard guard(lock_for(id));
    AnnotationSession session = load(id);
    AdjudicationResult result = privminer::adjudicate(session, resolutions, timestamp);
    for (const LabelEvent& e : result.events) {
        append_line(events_path(id), to_json(e).dump());
    }
    return result;
}

std::string utc_timestamp()
{
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace privminer
