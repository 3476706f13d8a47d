#include "ca/service.hpp"

#include "ca/error.hpp"
#include "ca/serialize.hpp"
#include "ca/text.hpp"
#include "ca/util.hpp"

#include <httplib.h>

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>

namespace fs = std::filesystem;

namespace ca::service {

namespace {

bool valid_id(const std::string& id) {
    return !id.empty() && id.size() <= 64 &&
           std::all_of(id.begin(), id.end(), [](char c) { return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'f'); });
}

Response error_response(int status, std::string_view kind, const std::string& message,
                        const std::vector<std::string>& details = {}) {
    json body{{"error", message}, {"kind", kind}};
    if (!details.empty()) body["details"] = details;
    return {status, std::move(body)};
}

Response error_response(int status, const Error& e) {
    return error_response(status, to_string(e.kind()), e.what(), e.kind() == ErrorKind::ValidationError ? e.details()
                                                                                                          : std::vector<std::string>{});
}

Response not_found(const std::string& id) { return error_response(404, "NotFound", "no session " + id); }

json event(std::string_view name, json payload) {
    payload["event"] = name;
    payload["ts"] = utc_timestamp();
    return payload;
}

}  // namespace

// ---------------------------------------------------------------------------

SessionLog::SessionLog(fs::path dir) : dir_(std::move(dir)) {}

fs::path SessionLog::path_for(const std::string& session_id) const { return dir_ / "sessions" / (session_id + ".jsonl"); }

bool SessionLog::exists(const std::string& session_id) const { return fs::exists(path_for(session_id)); }

void SessionLog::append(const std::string& session_id, const std::vector<json>& events) {
    std::error_code ec;
    fs::create_directories(dir_ / "sessions", ec);
    const fs::path path = path_for(session_id);
    std::string payload;
    for (const auto& e : events) payload += e.dump() + "\n";

    // One write per batch so a crash leaves either the whole turn or a torn tail.
    const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
    if (fd < 0) throw Error(ErrorKind::IoError, "cannot open " + path.string() + ": " + std::strerror(errno));
    std::size_t written = 0;
    while (written < payload.size()) {
        const ssize_t n = ::write(fd, payload.data() + written, payload.size() - written);
        if (n < 0) {
            if (errno == EINTR) continue;
            const int err = errno;
            ::close(fd);
            throw Error(ErrorKind::IoError, "cannot write " + path.string() + ": " + std::strerror(err));
        }
        written += static_cast<std::size_t>(n);
    }
    ::fsync(fd);
    ::close(fd);
}

dialog::DialogState SessionLog::load(const std::string& session_id) const {
    const fs::path path = path_for(session_id);
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::MissingFile, "no session file " + path.string());

    std::vector<dialog::TurnRecord> transcript;
    std::optional<dialog::DialogState> state;
    std::string line;
    while (std::getline(in, line)) {
        if (text::trim(line).empty()) continue;
        json e;
        try {
            e = json::parse(line);
        } catch (const json::exception&) {
            if (in.peek() == EOF) break;  // torn final line
            throw Error(ErrorKind::ParseError, path.string() + ": corrupt event line");
        }
        const std::string kind = e.value("event", "");
        if (kind == "turn") {
            for (const auto& r : e.at("records")) transcript.push_back(serialize::turn_from_json(r));
        } else if (kind == "state") {
            state = serialize::state_from_snapshot(e.at("state"));
        }
    }
    if (!state) throw Error(ErrorKind::ParseError, path.string() + ": no state snapshot");
    state->transcript = std::move(transcript);
    return *state;
}

// ---------------------------------------------------------------------------

Service::Service(std::shared_ptr<const engine::Engine> engine, Options options, std::vector<std::string> startup_errors)
    : engine_(std::move(engine)),
      options_(std::move(options)),
      startup_errors_(std::move(startup_errors)),
      log_(options_.data_dir) {}

std::shared_ptr<Service::Session> Service::find(const std::string& session_id) {
    if (!valid_id(session_id)) return nullptr;
    std::lock_guard lock(sessions_mutex_);
    if (auto it = sessions_.find(session_id); it != sessions_.end()) return it->second;
    if (!log_.exists(session_id)) return nullptr;
    auto session = std::make_shared<Session>();
    session->state = log_.load(session_id);
    sessions_[session_id] = session;
    return session;
}

Response Service::health() const {
    if (!engine_) return {503, {{"status", "unavailable"}, {"errors", startup_errors_}}};
    return {200, {{"status", "ok"}}};
}

Response Service::create_session(const json& body) {
    if (!engine_) {
        auto r = error_response(503, "ValidationError", "project failed validation", startup_errors_);
        return r;
    }
    std::string locale;
    std::string persona;
    if (body.is_object()) {
        if (body.contains("locale") && body["locale"].is_string()) locale = body["locale"].get<std::string>();
        if (body.contains("persona") && body["persona"].is_string()) persona = body["persona"].get<std::string>();
    }
    if (!locale.empty() && !engine_->config().has_locale(locale))
        return error_response(422, "UndeclaredLocale", "locale " + locale + " is not declared");

    auto session = std::make_shared<Session>();
    session->state = engine_->start_session(locale, persona);
    const std::string id = session->state.session_id;
    try {
        log_.append(id, {event("state", {{"state", serialize::state_snapshot(session->state)}})});
    } catch (const Error& e) {
        return error_response(500, e);
    }
    {
        std::lock_guard lock(sessions_mutex_);
        sessions_[id] = session;
    }
    return {201, {{"session_id", id}}};
}

Response Service::post_message(const std::string& session_id, const json& body) {
    auto session = find(session_id);
    if (!session) return not_found(session_id);
    if (!body.is_object() || !body.contains("text") || !body["text"].is_string() ||
        text::trim(body["text"].get<std::string>()).empty())
        return error_response(422, "EmptyUtterance", "text must be a non-empty string");

    std::lock_guard lock(session->mutex);
    if (session->state.handed_off) return error_response(409, "Precondition", "session was handed off to an agent");

    dialog::DialogState next = session->state;
    const std::size_t before = next.transcript.size();
    engine::TurnResult result;
    try {
        result = engine_->handle(next, body["text"].get<std::string>());
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::EmptyUtterance) return error_response(422, e);
        if (e.kind() == ErrorKind::Precondition) return error_response(409, e);
        if (e.is_provider_error()) return error_response(502, e);
        return error_response(500, e);
    }

    json records = json::array();
    for (std::size_t i = before; i < next.transcript.size(); ++i) records.push_back(serialize::to_json(next.transcript[i]));
    try {
        log_.append(session_id, {event("turn", {{"records", records}}),
                                 event("state", {{"state", serialize::state_snapshot(next)}})});
    } catch (const Error& e) {
        return error_response(500, e);
    }
    session->state = std::move(next);
    return {200, serialize::to_json(result)};
}

Response Service::transcript(const std::string& session_id) {
    auto session = find(session_id);
    if (!session) return not_found(session_id);
    std::lock_guard lock(session->mutex);
    return {200, serialize::to_json(session->state.transcript)};
}

Response Service::handoff(const std::string& session_id) {
    auto session = find(session_id);
    if (!session) return not_found(session_id);
    std::lock_guard lock(session->mutex);

    dialog::DialogState next = session->state;
    dialog::BoosterActivation activation;
    boosters::HandoffSummary summary;
    try {
        summary = engine_->handoff(next, &activation);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::Precondition) return error_response(409, e);
        if (e.kind() == ErrorKind::FormatParseError || e.is_provider_error()) return error_response(502, e);
        return error_response(500, e);
    }
    try {
        log_.append(session_id, {event("handoff", {{"summary", serialize::to_json(summary)},
                                                   {"booster", serialize::to_json(activation)}}),
                                 event("state", {{"state", serialize::state_snapshot(next)}})});
    } catch (const Error& e) {
        return error_response(500, e);
    }
    session->state = std::move(next);
    return {200, serialize::to_json(summary)};
}

void Service::mount(httplib::Server& server) {
    const std::string origin = options_.cors_origin;
    server.set_default_headers({{"Access-Control-Allow-Origin", origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    server.Options(R"(/v1/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    auto send = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body.dump(), "application/json");
    };
    auto parse = [](const httplib::Request& req, json& out) {
        if (req.body.empty()) {
            out = json::object();
            return true;
        }
        try {
            out = json::parse(req.body);
            return true;
        } catch (const json::exception&) {
            return false;
        }
    };
    auto bad_json = [send](httplib::Response& res) {
        send(res, error_response(400, "ParseError", "request body is not valid JSON"));
    };

    server.Get("/v1/health", [this, send](const httplib::Request&, httplib::Response& res) { send(res, health()); });
    server.Post("/v1/sessions", [this, send, parse, bad_json](const httplib::Request& req, httplib::Response& res) {
        json body;
        if (!parse(req, body)) return bad_json(res);
        send(res, create_session(body));
    });
    server.Post(R"(/v1/sessions/([^/]+)/messages)",
                [this, send, parse, bad_json](const httplib::Request& req, httplib::Response& res) {
                    json body;
                    if (!parse(req, body)) return bad_json(res);
                    send(res, post_message(req.matches[1], body));
                });
    server.Get(R"(/v1/sessions/([^/]+)/transcript)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, transcript(req.matches[1]));
    });
    server.Post(R"(/v1/sessions/([^/]+)/handoff)", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, handoff(req.matches[1]));
    });
    server.set_exception_handler([send](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
        std::string message = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception& e) {
            message = e.what();
        } catch (...) {
        }
        send(res, error_response(500, "Internal", message));
    });
}

}  // namespace ca::service
