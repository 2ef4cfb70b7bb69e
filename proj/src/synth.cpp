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

#include "privminer/synth.hpp"

#include "privminer/jsonl.hpp"
#include "privminer/random.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace privminer {

namespace {

const std::array<std::vector<std::string>, 5> kTopicWords = {{
    {"advertisers", "brokers", "third", "parties", "profit", "sold", "monetize", "marketing",
     "companies", "revenue", "buyers", "shared"},
    {"password", "breach", "stolen", "login", "hacker", "compromised", "unauthorized", "reset",
     "email", "attack", "locked", "security"},
    {"cloud", "photos", "encrypted", "storage", "uploaded", "server", "copies", "deleted", "restore",
     "files", "sync", "leaked"},
    {"location", "gps", "background", "monitors", "follows", "movements", "permission", "sensors",
     "whereabouts", "constantly", "spying", "microphone"},
    {"options", "disable", "toggle", "control", "preferences", "manage", "opt", "consent", "choices",
     "menu", "switch", "visibility"},
}};

const std::vector<std::string> kPrivacyCommon = {"privacy", "data",    "personal", "information",
                                                 "collect", "worried", "invasion", "concerned"};

const std::vector<std::string> kGeneric = {
    "game",     "fun",       "levels",  "graphics", "crash",    "crashes",  "battery",  "ads",
    "love",     "great",     "awesome", "boring",   "slow",     "fast",     "music",    "songs",
    "playlist", "video",     "quality", "camera",   "filter",   "chat",     "friends",  "messages",
    "design",   "interface", "buttons", "font",     "dark",     "mode",     "recipe",   "workout",
    "fitness",  "steps",     "weather", "forecast", "maps",     "directions", "traffic", "shopping",
    "cart",     "delivery",  "food",    "order",    "price",    "subscription", "premium", "free",
    "trial",    "bug",       "freezes", "lag",      "loading",  "screen",   "keyboard", "widget",
    "icon",     "colors",    "stars",   "refund"};

const std::vector<std::string> kFiller = {"i", "my", "the", "is", "this", "and", "it", "so"};

const std::array<std::pair<const char*, const char*>, 8> kApps = {{{"Chatter", "social"},
                                                                    {"PicShare", "social"},
                                                                    {"RunLog", "health"},
                                                                    {"StepCount", "health"},
                                                                    {"QuickPay", "finance"},
                                                                    {"CoinBook", "finance"},
                                                                    {"MapGo", "navigation"},
                                                                    {"RideNow", "navigation"}}};

const std::string& pick(const std::vector<std::string>& pool, Rng& rng)
{
    return pool[rng.below(pool.size())];
}

// `count` distinct words from `pool`.
std::vector<std::string> sample(const std::vector<std::string>& pool, std::size_t count, Rng& rng)
{
    std::vector<std::string> copy = pool;
    rng.shuffle(copy);
    copy.resize(std::min(count, copy.size()));
    return copy;
}

std::string join_with_filler(std::vector<std::string> words, Rng& rng)
{
    words.push_back(pick(kFiller, rng));
    words.push_back(pick(kFiller, rng));
    rng.shuffle(words);
    std::string out;
    for (const std::string& w : words) {
        out += (out.empty() ? "" : " ") + w;
    }
    out[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(out[0])));
    return out + ".";
}

struct Draft {
    std::string text;
    int label = 0;
    int topic = -1;
};

std::string review_id(std::size_t i)
{
    char buf[16];
    std::snprintf(buf, sizeof buf, "r%05zu", i);
    return buf;
}

Corpus finish(std::vector<Draft>& drafts, Rng& rng, LabelList& labels, std::map<std::string, int>* topics)
{
    rng.shuffle(drafts);
    Corpus corpus;
    for (std::size_t i = 0; i < drafts.size(); ++i) {
        const auto& app = kApps[i % kApps.size()];
        Review r;
        r.id = review_id(i);
        r.app = app.first;
        r.category = app.second;
        r.text = drafts[i].text;
        r.rating = static_cast<int>(1 + rng.below(5));
        labels.emplace_back(r.id, drafts[i].label);
        if (topics && drafts[i].topic >= 0) {
            (*topics)[r.id] = drafts[i].topic;
        }
        corpus.add(std::move(r));
    }
    return corpus;
}

const char* kPolicy = R"(# Privacy Policy

This privacy policy explains how we collect, use and share your personal information and data.

# Information We Collect

We collect information you provide such as your email, password and login details. With your
permission we collect precise location from gps and background sensors, and may access the
microphone and camera.

# How We Share Information

We may share or sell personal data to third parties, advertisers, data brokers and marketing
companies, and we may monetize information shared with partners.

# Data Security and Storage

We use security measures against unauthorized access and breach. Photos and files you back up are
uploaded to encrypted cloud storage on our server; deleted copies may persist in backup.

# Your Choices

You can manage privacy settings and preferences, disable tracking, opt out, withdraw consent and
control the visibility of your information from the settings menu.

# Contact Us

Questions about this policy can be sent to our support team at the address on our website.

# Changes to This Policy

We may revise this policy from time to time and will post the new version here.
)";

} // namespace

SyntheticCorpus make_synthetic_corpus(std::uint64_t seed, std::size_t per_topic, std::size_t distractors)
{
    Rng rng(seed);
    std::vector<Draft> drafts;
    for (int t = 0; t < 5; ++t) {
        for (std::size_t i = 0; i < per_topic; ++i) {
            std::vector<std::string> words = sample(kTopicWords[t], 5, rng);
            words.push_back(kTopicSignatures[t]);
            for (const std::string& w : sample(kPrivacyCommon, 2, rng)) {
                words.push_back(w);
            }
            drafts.push_back({join_with_filler(std::move(words), rng), 1, t});
        }
    }
    for (std::size_t i = 0; i < distractors; ++i) {
        drafts.push_back({join_with_filler(sample(kGeneric, 6 + rng.below(5), rng), rng), 0, -1});
    }
    SyntheticCorpus out;
    out.reviews = finish(drafts, rng, out.labels, &out.topic_of);
    out.policy = kPolicy;
    return out;
}

BootstrapFixture make_bootstrap_fixture(std::uint64_t seed)
{
    Rng rng(seed);
    BootstrapFixture f;
    std::vector<std::string> pool_a, pool_b;
    for (int i = 0; i < 30; ++i) {
        pool_a.push_back("concern" + std::string(1, static_cast<char>('a' + i % 26)) + std::to_string(i / 26));
    }
    for (int i = 0; i < 40; ++i) {
        pool_b.push_back("follow" + std::string(1, static_cast<char>('a' + i % 26)) + std::to_string(i / 26));
    }
    std::vector<std::string> generic;
    for (const std::string& w : kGeneric) {
        if (w != f.poison) {
            generic.push_back(w);
        }
    }
    std::vector<Draft> drafts;
    for (int i = 0; i < 40; ++i) {
        auto w = sample(pool_a, 3, rng);
        w.push_back(f.seed);
        drafts.push_back({join_with_filler(std::move(w), rng), 1, -1});
    }
    for (int i = 0; i < 20; ++i) {
        auto w = sample(pool_a, 2, rng);
        w.push_back(f.seed);
        w.push_back(f.bridge);
        drafts.push_back({join_with_filler(std::move(w), rng), 1, -1});
    }
    for (int i = 0; i < 40; ++i) {
        auto w = sample(pool_b, 3, rng);
        w.push_back(f.bridge);
        if (i % 2 == 0) {
            w.push_back(f.poison);
        }
        drafts.push_back({join_with_filler(std::move(w), rng), 1, -1});
    }
    for (int i = 0; i < 200; ++i) {
        auto w = sample(generic, 5, rng);
        if (i % 2 == 0) {
            w.push_back(f.poison);
        }
        drafts.push_back({join_with_filler(std::move(w), rng), 0, -1});
    }
    f.reviews = finish(drafts, rng, f.labels, nullptr);
    return f;
}

void write_labels(const LabelList& labels, const std::filesystem::path& path)
{
    std::string out;
    for (const auto& [id, label] : labels) {
        out += json{{"id", id}, {"label", label}}.dump() + "\n";
    }
    write_file(path, out);
}

} // namespace privminer
