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

#include "privminer/jsonl.hpp"
#include "privminer/retrieval.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace privminer {

enum class LabelSource { human, adjudication };

/// One entry of a session's append-only log. An event with no label is a
/// skip. Later events for the same (review, annotator) supersede earlier ones.
struct LabelEvent {
    std::string session_id;
    std::string review_id;
    std::string annotator;
    std::optional<int> label;
    std::string timestamp;
    LabelSource source = LabelSource::human;

    bool operator==(const LabelEvent&) const = default;
};

json to_json(const LabelEvent& e);
LabelEvent label_event_from_json(const json& obj);

enum class SlotStatus { unlabeled, labeled, skipped };

const char* to_string(SlotStatus s);

struct Candidate {
    std::string id;
    std::string text;
    std::string app;
};

/// Session state derived by folding over its events. Never persisted
/// directly.
class AnnotationSession {
public:
    AnnotationSession(std::string id, std::vector<Candidate> candidates,
                      std::vector<std::string> annotators);

    const std::string& id() const { return id_; }
    const std::vector<Candidate>& candidates() const { return candidates_; }
    std::vector<std::string> candidate_ids() const;
    const std::vector<std::string>& annotators() const { return annotators_; }
    bool has_candidate(std::string_view id) const;
    bool has_annotator(std::string_view name) const;

    SlotStatus status(std::string_view annotator, std::string_view review_id) const;
    std::optional<int> label(std::string_view annotator, std::string_view review_id) const;
    /// Label set by an adjudication event, if any.
    std::optional<std::optional<int>> resolution(std::string_view review_id) const;

    /// Applies one event. Throws DataError for an unknown review, or an
    /// unknown annotator on a human event.
    void apply(const LabelEvent& event);

    const std::vector<LabelEvent>& events() const { return events_; }

    /// First candidate the annotator has not labeled or skipped.
    std::optional<std::string> next_unlabeled(std::string_view annotator) const;
    std::map<std::string, std::size_t> progress(std::string_view annotator) const;

private:
    std::string id_;
    std::vector<Candidate> candidates_;
    std::unordered_map<std::string, std::size_t> candidate_index_;
    std::vector<std::string> annotators_;
    // (annotator, review) -> label; nullopt value means skipped.
    std::map<std::pair<std::string, std::string>, std::optional<int>> slots_;
    std::map<std::string, std::optional<int>> resolutions_;
    std::vector<LabelEvent> events_;
};

/// Throws DataError on no candidates, no annotators or duplicate ids.
AnnotationSession create_session(std::string id, std::vector<Candidate> candidates,
                                 std::vector<std::string> annotators);
AnnotationSession create_session(std::string id, const RankedList& candidates,
                                 std::vector<std::string> annotators);

/// Validates and applies a human label (nullopt = skip). Returns the event
/// so the caller can persist it.
LabelEvent record_label(AnnotationSession& session, std::string_view review_id,
                        std::string_view annotator, std::optional<int> label,
                        std::string timestamp);

/// Cohen's kappa from a 2x2 table: both 1, first only 1, second only 1, both 0.
double cohen_kappa(std::uint64_t both_pos, std::uint64_t first_pos, std::uint64_t second_pos,
                   std::uint64_t both_neg);

/// Kappa between two annotators (the session's first two by default) over
/// reviews both labeled; skips excluded.
double cohen_kappa(const AnnotationSession& session);
double cohen_kappa(const AnnotationSession& session, std::string_view first,
                   std::string_view second);

struct LabeledItem {
    std::string review_id;
    int label = 0;

    bool operator==(const LabeledItem&) const = default;
};

struct LabeledDataset {
    std::vector<LabeledItem> items;
    std::vector<std::string> provenance;

    std::size_t count(int label) const;
    std::size_t size() const { return items.size(); }
};

void write_dataset(const LabeledDataset& dataset, const std::filesystem::path& path);
LabeledDataset load_dataset(const std::filesystem::path& path);

struct AdjudicationResult {
    LabeledDataset dataset;
    std::vector<LabelEvent> events;
};

/// Resolutions map review id to a final label, or nullopt to drop the
/// review. Reviews labeled consistently by enough annotators keep the common
/// label; under-labeled reviews are dropped unless resolved; unresolved
/// disagreements raise DataError listing them. Resolution events are applied
/// to the session and returned for persistence.
AdjudicationResult adjudicate(AnnotationSession& session,
                              const std::map<std::string, std::optional<int>>& resolutions,
                              const std::string& timestamp);

/// Samples the majority class without replacement down to the minority size.
LabeledDataset undersample_balance(const LabeledDataset& dataset, std::uint64_t seed);

/// Stratified split; `train_ratio` is the training fraction (0.8 for 8:2).
/// Each class contributes round((1 - train_ratio) * n_class) test items.
std::pair<LabeledDataset, LabeledDataset> train_test_split(const LabeledDataset& dataset,
                                                           double train_ratio, std::uint64_t seed);

/// Persists sessions under a directory as `<id>.session.json` (candidates and
/// annotators) plus `<id>.events.jsonl` (the LabelEvent log). Writes to one
/// session are serialized.
class SessionStore {
public:
    explicit SessionStore(std::filesystem::path dir);

    /// Throws DataError if the id exists.
    AnnotationSession create(std::string id, std::vector<Candidate> candidates,
                             std::vector<std::string> annotators);
    bool exists(std::string_view id) const;
    /// Replays the log. Throws NotFoundError for an unknown id.
    AnnotationSession load(std::string_view id) const;
    std::vector<std::string> list() const;

    /// Records a human label. Idempotent: if the slot already holds this
    /// exact label (or skip), nothing is appended.
    AnnotationSession label(std::string_view id, std::string_view review_id,
                            std::string_view annotator, std::optional<int> label,
                            std::string timestamp);

    AdjudicationResult adjudicate(std::string_view id,
                                  const std::map<std::string, std::optional<int>>& resolutions,
                                  const std::string& timestamp);

    std::filesystem::path events_path(std::string_view id) const;

private:
    std::filesystem::path meta_path(std::string_view id) const;
    std::mutex& lock_for(std::string_view id);

    std::filesystem::path dir_;
    std::mutex locks_mutex_;
    std::map<std::string, std::unique_ptr<std::mutex>, std::less<>> locks_;
};

/// Current UTC time as ISO-8601 (seconds precision).
std::string utc_timestamp();

} // namespace privminer
