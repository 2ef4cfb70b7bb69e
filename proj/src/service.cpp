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

#include "privminer/service.hpp"

#include "privminer/error.hpp"
#include "privminer/jsonl.hpp"
#include "privminer/retrieval.hpp"

#include <httplib.h>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace privminer {

namespace fs = std::filesystem;

fs::path resolve_data_dir(const fs::path& fallback)
{
    if (const char* env = std::getenv("PRIVMINER_DATA_DIR"); env && *env) {
        return env;
    }
    return fallback;
}

namespace {

void check_run_id(const std::string& id)
{
    if (id.empty() || id.front() == '.' ||
        id.find_first_not_of("abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789-_.") !=
            std::string::npos) {
        throw UsageError("invalid id '" + id + "'");
    }
}

fs::path resolve(const fs::path& p, const fs::path& base) { return p.is_absolute() ? p : base / p; }

json parse_body(const std::string& body)
{
    try {
        json j = json::parse(body);
        if (!j.is_object()) {
            throw UsageError("request body must be a JSON object");
        }
        return j;
    } catch (const json::parse_error& e) {
        throw UsageError(std::string("malformed JSON body: ") + e.what());
    }
}

json session_json(const AnnotationSession& s)
{
    json progress = json::object();
    for (const std::string& a : s.annotators()) {
        progress[a] = s.progress(a);
    }
    json candidates = json::array();
    for (const Candidate& c : s.candidates()) {
        json labels = json::object();
        for (const std::string& a : s.annotators()) {
            const SlotStatus st = s.status(a, c.id);
            labels[a] = st == SlotStatus::labeled ? json(*s.label(a, c.id)) : json(to_string(st));
        }
        candidates.push_back({{"id", c.id}, {"text", c.text}, {"app", c.app}, {"labels", labels}});
    }
    return {{"id", s.id()},
            {"annotators", s.annotators()},
            {"progress", progress},
            {"candidates", candidates},
            {"events", s.events().size()}};
}

json agreement_json(const AnnotationSession& s)
{
    json out = {{"annotators", s.annotators()}};
    if (s.annotators().size() < 2) {
        out["kappa"] = nullptr;
        out["reason"] = "kappa needs two annotators";
        return out;
    }
    const std::string& a = s.annotators()[0];
    const std::string& b = s.annotators()[1];
    std::uint64_t t[2][2] = {{0, 0}, {0, 0}};
    for (const Candidate& c : s.candidates()) {
        const auto la = s.label(a, c.id);
        const auto lb = s.label(b, c.id);
        if (la && lb) {
            ++t[*la][*lb];
        }
    }
    out["table"] = {{"both_positive", t[1][1]},
                    {"first_only", t[1][0]},
                    {"second_only", t[0][1]},
                    {"both_negative", t[0][0]}};
    out["pairs"] = t[0][0] + t[0][1] + t[1][0] + t[1][1];
    if (out["pairs"].get<std::uint64_t>() == 0) {
        out["kappa"] = nullptr;
        out["reason"] = "no doubly-labeled items";
    } else {
        out["kappa"] = cohen_kappa(t[1][1], t[1][0], t[0][1], t[0][0]);
    }
    return out;
}

std::optional<int> parse_label(const json& v)
{
    if (v.is_null() || (v.is_string() && v.get<std::string>() == "skip")) {
        return std::nullopt;
    }
    if (v.is_number_integer() && (v.get<int>() == 0 || v.get<int>() == 1)) {
        return v.get<int>();
    }
    throw UsageError("label must be 0, 1, null or \"skip\"");
}

std::vector<std::string> read_csv_lines(const fs::path& path)
{
    std::vector<std::string> lines;
    std::istringstream in(read_file(path));
    std::string line;
    std::getline(in, line);   // header
    while (std::getline(in, line)) {
        if (!line.empty()) {
            lines.push_back(line);
        }
    }
    return lines;
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        out.push_back(cell);
    }
    return out;
}

} // namespace

// ---- bootstrap store ---------------------------------------------------------

BootstrapStore::BootstrapStore(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

bool BootstrapStore::exists(const std::string& id) const
{
    check_run_id(id);
    return fs::exists(dir_ / id / "config.json");
}

std::vector<std::string> BootstrapStore::list() const
{
    std::vector<std::string> ids;
    for (const auto& e : fs::directory_iterator(dir_)) {
        if (fs::exists(e.path() / "config.json")) {
            ids.push_back(e.path().filename().string());
        }
    }
    std::sort(ids.begin(), ids.end());
    return ids;
}

json BootstrapStore::create(const json& request, const fs::path& base)
{
    const std::string id = request.value("id", std::string{});
    check_run_id(id);
    if (!request.contains("reviews") || !request.contains("seed_keywords")) {
        throw UsageError("bootstrap request needs \"reviews\" and \"seed_keywords\"");
    }
    json config = {{"id", id},
                   {"reviews", resolve(request["reviews"].get<std::string>(), base).string()},
                   {"seed_keywords", request["seed_keywords"]},
                   {"max_iters", request.value("max_iters", 10)},
                   {"candidates_per_iter", request.value("candidates_per_iter", 5)}};
    if (request.contains("labels") && !request["labels"].is_null()) {
        config["labels"] = resolve(request["labels"].get<std::string>(), base).string();
    }
    {
        std::lock_guard guard(entries_mutex_);
        if (exists(id) || entries_.count(id)) {
            throw DataError("bootstrap run '" + id + "' already exists");
        }
    }
    write_file(dir_ / id / "config.json", config.dump(2) + "\n");
    write_file(dir_ / id / "decisions.jsonl", "");
    try {
        return state(id);
    } catch (...) {
        fs::remove_all(dir_ / id);
        std::lock_guard guard(entries_mutex_);
        entries_.erase(id);
        throw;
    }
}

BootstrapStore::Entry& BootstrapStore::entry(const std::string& id)
{
    check_run_id(id);
    Entry* e = nullptr;
    {
        std::lock_guard guard(entries_mutex_);
        auto it = entries_.find(id);
        if (it == entries_.end()) {
            if (!fs::exists(dir_ / id / "config.json")) {
                throw NotFoundError("no bootstrap run '" + id + "'");
            }
            it = entries_.emplace(id, std::make_unique<Entry>()).first;
        }
        e = it->second.get();
    }
    std::lock_guard guard(e->mutex);
    if (e->run) {
        return *e;
    }
    json config;
    try {
        config = json::parse(read_file(dir_ / id / "config.json"));
    } catch (const json::exception& ex) {
        throw DataError("corrupt bootstrap config for '" + id + "': " + ex.what());
    }
    const Corpus corpus = load_reviews(config.at("reviews").get<std::string>());
    std::vector<TokenStream> docs = tokenize_corpus(corpus, default_pipeline_tokenizer());
    std::vector<int> truth;
    if (config.contains("labels")) {
        const RelevanceJudgments j = load_judgments(config["labels"].get<std::string>());
        for (const Review& r : corpus) {
            truth.push_back(j.is_relevant(r.id) ? 1 : 0);
        }
    }
    for (const Review& r : corpus) {
        e->texts[r.id] = r.text;
    }
    BootstrapConfig bc;
    bc.max_iters = config.value("max_iters", 10);
    bc.candidates_per_iter = config.value("candidates_per_iter", std::size_t{5});
    auto run = std::make_unique<BootstrapRun>(std::move(docs), std::move(truth),
                                              config.at("seed_keywords").get<std::vector<std::string>>(), bc);
    for_each_jsonl(dir_ / id / "decisions.jsonl", [&](std::size_t, const json& d) {
        run->decide(d.at("keyword").get<std::string>(), d.at("approved").get<bool>());
    });
    e->run = std::move(run);
    return *e;
}

json BootstrapStore::state_locked(const std::string& id, Entry& e) const
{
    json history = json::array();
    for (const BootstrapIteration& it : e.run->history()) {
        history.push_back(to_json(it));
    }
    return {{"id", id},
            {"finished", e.run->finished()},
            {"keywords", std::vector<std::string>(e.run->keywords().begin(), e.run->keywords().end())},
            {"history", history}};
}

json BootstrapStore::state(const std::string& id)
{
    Entry& e = entry(id);
    std::lock_guard guard(e.mutex);
    return state_locked(id, e);
}

json BootstrapStore::pending(const std::string& id)
{
    Entry& e = entry(id);
    std::lock_guard guard(e.mutex);
    json items = json::array();
    for (const KeywordCandidate& c : e.run->pending()) {
        json samples = json::array();
        for (const std::string& sid : c.sample_ids) {
            samples.push_back({{"id", sid}, {"text", e.texts.at(sid)}});
        }
        items.push_back({{"keyword", c.keyword}, {"score", c.score}, {"samples", samples}});
    }
    return {{"id", id},
            {"iteration", e.run->history().back().iteration},
            {"finished", e.run->finished()},
            {"pending", items}};
}

json BootstrapStore::decide(const std::string& id, const std::string& keyword, bool approved)
{
    Entry& e = entry(id);
    std::lock_guard guard(e.mutex);
    for (const BootstrapIteration& it : e.run->history()) {
        const bool was_approved = std::count(it.approved.begin(), it.approved.end(), keyword) > 0;
        const bool was_rejected = std::count(it.rejected.begin(), it.rejected.end(), keyword) > 0;
        if (was_approved || was_rejected) {
            if (was_approved != approved) {
                throw DataError("keyword '" + keyword + "' was already " +
                                (was_approved ? "approved" : "rejected"));
            }
            return state_locked(id, e);
        }
    }
    const auto open = e.run->pending();
    if (std::none_of(open.begin(), open.end(), [&](const KeywordCandidate& c) { return c.keyword == keyword; })) {
        throw DataError("keyword '" + keyword + "' is not pending");
    }
    const int iteration = e.run->history().back().iteration;
    e.run->decide(keyword, approved);
    append_line(dir_ / id / "decisions.jsonl",
                json{{"keyword", keyword}, {"approved", approved}, {"iteration", iteration}}.dump());
    return state_locked(id, e);
}

// ---- HTTP ----------------------------------------------------------------------

Service::Service(ServiceConfig config)
    : config_(std::move(config)),
      sessions_((fs::create_directories(config_.data_dir / "sessions"), config_.data_dir / "sessions")),
      bootstrap_(config_.data_dir / "bootstrap")
{
}

namespace {

void send_json(httplib::Response& res, const json& body, int status = 200)
{
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

template <typename Fn>
httplib::Server::Handler guarded(Fn fn)
{
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const NotFoundError& e) {
            send_json(res, {{"error", e.what()}}, 404);
        } catch (const UsageError& e) {
            send_json(res, {{"error", e.what()}}, 400);
        } catch (const DataError& e) {
            send_json(res, {{"error", e.what()}}, 400);
        } catch (const json::exception& e) {
            send_json(res, {{"error", std::string("bad request: ") + e.what()}}, 400);
        } catch (const std::exception& e) {
            send_json(res, {{"error", e.what()}}, 500);
        }
    };
}

fs::path run_dir(const ServiceConfig& c, const std::string& id)
{
    check_run_id(id);
    const fs::path dir = c.data_dir / "runs" / id;
    if (!fs::exists(dir / "manifest.json")) {
        throw NotFoundError("no run '" + id + "'");
    }
    return dir;
}

json load_manifest(const fs::path& dir)
{
    try {
        return json::parse(read_file(dir / "manifest.json"));
    } catch (const json::parse_error& e) {
        throw DataError("corrupt manifest in " + dir.string() + ": " + e.what());
    }
}

} // namespace

void Service::mount(httplib::Server& server)
{
    server.Get("/api/health", guarded([](const auto&, auto& res) { send_json(res, {{"status", "ok"}}); }));

    // Sessions.
    server.Get("/api/sessions", guarded([this](const auto&, auto& res) {
        send_json(res, {{"sessions", sessions_.list()}});
    }));
    server.Post("/api/sessions", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const json body = parse_body(req.body);
        std::vector<Candidate> candidates;
        for (const json& c : body.at("candidates")) {
            if (c.is_string()) {
                candidates.push_back({c.get<std::string>(), {}, {}});
            } else {
                candidates.push_back({c.at("id").get<std::string>(), c.value("text", std::string{}),
                                      c.value("app", std::string{})});
            }
        }
        const AnnotationSession s = sessions_.create(body.at("id").get<std::string>(), std::move(candidates),
                                                     body.at("annotators").get<std::vector<std::string>>());
        send_json(res, session_json(s), 201);
    }));
    server.Get("/api/sessions/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, session_json(sessions_.load(req.path_params.at("id"))));
    }));
    server.Get("/api/sessions/:id/next", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const AnnotationSession s = sessions_.load(req.path_params.at("id"));
        const std::string annotator = req.get_param_value("annotator");
        if (!s.has_annotator(annotator)) {
            throw UsageError("unknown annotator '" + annotator + "'");
        }
        json out = {{"annotator", annotator}, {"progress", s.progress(annotator)}, {"candidate", nullptr}};
        if (const auto next = s.next_unlabeled(annotator)) {
            for (const Candidate& c : s.candidates()) {
                if (c.id == *next) {
                    out["candidate"] = {{"id", c.id}, {"text", c.text}, {"app", c.app}};
                }
            }
        }
        send_json(res, out);
    }));
    server.Post("/api/sessions/:id/labels", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const json body = parse_body(req.body);
        const AnnotationSession s =
            sessions_.label(req.path_params.at("id"), body.at("review_id").get<std::string>(),
                            body.at("annotator").get<std::string>(),
                            parse_label(body.contains("label") ? body["label"] : json(nullptr)), utc_timestamp());
        send_json(res, session_json(s));
    }));
    server.Get("/api/sessions/:id/agreement", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, agreement_json(sessions_.load(req.path_params.at("id"))));
    }));

    // Keyword bootstrap.
    server.Get("/api/bootstrap", guarded([this](const auto&, auto& res) {
        send_json(res, {{"runs", bootstrap_.list()}});
    }));
    server.Post("/api/bootstrap", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, bootstrap_.create(parse_body(req.body), config_.data_dir), 201);
    }));
    server.Get("/api/bootstrap/:id", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, bootstrap_.state(req.path_params.at("id")));
    }));
    server.Get("/api/bootstrap/:id/pending-keywords",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                   send_json(res, bootstrap_.pending(req.path_params.at("id")));
               }));
    server.Post("/api/bootstrap/:id/keywords", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const json body = parse_body(req.body);
        send_json(res, bootstrap_.decide(req.path_params.at("id"), body.at("keyword").get<std::string>(),
                                         body.at("approved").get<bool>()));
    }));

    // Topic runs, read-only.
    server.Get("/api/runs", guarded([this](const auto&, auto& res) {
        json runs = json::array();
        const fs::path root = config_.data_dir / "runs";
        std::vector<fs::path> dirs;
        if (fs::exists(root)) {
            for (const auto& e : fs::directory_iterator(root)) {
                if (fs::exists(e.path() / "manifest.json")) {
                    dirs.push_back(e.path());
                }
            }
        }
        std::sort(dirs.begin(), dirs.end());
        for (const fs::path& d : dirs) {
            const json m = load_manifest(d);
            runs.push_back({{"run_id", d.filename().string()},
                            {"K", m.value("K", 0)},
                            {"seed", m.value("seed", 0)},
                            {"num_reviews", m.value("num_reviews", 0)}});
        }
        send_json(res, {{"runs", runs}});
    }));
    server.Get("/api/runs/:id/topics", guarded([this](const httplib::Request& req, httplib::Response& res) {
        send_json(res, load_manifest(run_dir(config_, req.path_params.at("id"))));
    }));
    server.Get("/api/runs/:id/clusters/:k/reviews",
               guarded([this](const httplib::Request& req, httplib::Response& res) {
                   const fs::path dir = run_dir(config_, req.path_params.at("id"));
                   const json m = load_manifest(dir);
                   const std::string& ks = req.path_params.at("k");
                   std::size_t k = 0;
                   try {
                       std::size_t used = 0;
                       k = std::stoul(ks, &used);
                       if (used != ks.size()) {
                           throw std::invalid_argument(ks);
                       }
                   } catch (const std::logic_error&) {
                       throw UsageError("cluster index must be a non-negative integer");
                   }
                   if (k >= m.at("clusters").size()) {
                       throw NotFoundError("run has no cluster " + ks);
                   }
                   std::map<std::string, json> texts;
                   if (fs::exists(dir / "representatives.jsonl")) {
                       for_each_jsonl(dir / "representatives.jsonl", [&](std::size_t, const json& r) {
                           texts[r.at("id").get<std::string>()] = r;
                       });
                   }
                   json reviews = json::array();
                   for (const json& id : m["clusters"][k].at("representative_ids")) {
                       const std::string s = id.get<std::string>();
                       json r = {{"id", s}, {"text", nullptr}, {"app", nullptr}};
                       if (auto it = texts.find(s); it != texts.end()) {
                           r["text"] = it->second.value("text", std::string{});
                           r["app"] = it->second.value("app", std::string{});
                       }
                       reviews.push_back(r);
                   }
                   send_json(res, {{"cluster", k},
                                   {"size", m["clusters"][k].value("size", 0)},
                                   {"words", m["clusters"][k].value("words", json::array())},
                                   {"reviews", reviews}});
               }));
    server.Get("/api/runs/:id/projection", guarded([this](const httplib::Request& req, httplib::Response& res) {
        const fs::path dir = run_dir(config_, req.path_params.at("id"));
        std::map<std::string, int> cluster;
        if (fs::exists(dir / "assignment.csv")) {
            for (const std::string& line : read_csv_lines(dir / "assignment.csv")) {
                const auto cells = split_csv(line);
                if (cells.size() == 2) {
                    cluster[cells[0]] = std::stoi(cells[1]);
                }
            }
        }
        json points = json::array();
        if (fs::exists(dir / "projection.csv")) {
            for (const std::string& line : read_csv_lines(dir / "projection.csv")) {
                const auto cells = split_csv(line);
                if (cells.size() != 3) {
                    throw DataError("malformed projection row '" + line + "'");
                }
                const auto it = cluster.find(cells[0]);
                points.push_back({{"id", cells[0]},
                                  {"x", std::stod(cells[1])},
                                  {"y", std::stod(cells[2])},
                                  {"cluster", it == cluster.end() ? json(nullptr) : json(it->second)}});
            }
        }
        send_json(res, {{"run_id", req.path_params.at("id")}, {"points", points}});
    }));

    if (config_.ui_dir) {
        server.set_mount_point("/", config_.ui_dir->string());
    }
}

int serve(const ServiceConfig& config, const std::string& host, int port)
{
    Service service(config);
    httplib::Server server;
    service.mount(server);
    if (!server.bind_to_port(host, port)) {
        std::cerr << "error: cannot bind " << host << ":" << port << "\n";
        return 1;
    }
    std::cerr << "serving " << config.data_dir.string() << " on http://" << host << ":" << port << "\n";
    return server.listen_after_bind() ? 0 : 1;
}

} // namespace privminer
