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

#include "privminer/annotation.hpp"
#include "privminer/bootstrap.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

namespace httplib {
class Server;
}

namespace privminer {

/// Layout under data_dir: sessions/, bootstrap/<id>/, runs/<run_id>/.
struct ServiceConfig {
    std::filesystem::path data_dir;
    std::optional<std::filesystem::path> ui_dir;
};

/// PRIVMINER_DATA_DIR if set, else `fallback`.
std::filesystem::path resolve_data_dir(const std::filesystem::path& fallback);

/// Keyword bootstrap runs persisted as config.json plus an append-only
/// decisions.jsonl, rebuilt by replay.
class BootstrapStore {
public:
    explicit BootstrapStore(std::filesystem::path dir);

    /// `request`: {id, reviews, labels?, seed_keywords, max_iters?,
    /// candidates_per_iter?}. Relative paths resolve against `base`.
    json create(const json& request, const std::filesystem::path& base);
    bool exists(const std::string& id) const;
    std::vector<std::string> list() const;

    json state(const std::string& id);
    json pending(const std::string& id);
    /// Idempotent for a repeated identical decision. Throws NotFoundError
    /// for an unknown run and DataError for a keyword that was never
    /// proposed or was decided the other way.
    json decide(const std::string& id, const std::string& keyword, bool approved);

private:
    struct Entry {
        std::mutex mutex;
        std::unique_ptr<BootstrapRun> run;
        std::map<std::string, std::string> texts;
    };
    Entry& entry(const std::string& id);
    json state_locked(const std::string& id, Entry& e) const;

    std::filesystem::path dir_;
    std::mutex entries_mutex_;
    std::map<std::string, std::unique_ptr<Entry>> entries_;
};

class Service {
public:
    explicit Service(ServiceConfig config);

    void mount(httplib::Server& server);

    const ServiceConfig& config() const { return config_; }

private:
    ServiceConfig config_;
    SessionStore sessions_;
    BootstrapStore bootstrap_;
};

/// Serves until the process is stopped. Returns nonzero if the port cannot
/// be bound.
int serve(const ServiceConfig& config, const std::string& host, int port);

} // namespace privminer
