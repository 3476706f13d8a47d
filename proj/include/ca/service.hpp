#pragma once

#include "ca/dialog.hpp"
#include "ca/engine.hpp"

#include <json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

namespace httplib {
class Server;
}

namespace ca::service {

using nlohmann::json;

struct Response {
    int status = 200;
    json body;
};

struct Options {
    std::filesystem::path data_dir = "data";
    std::string cors_origin = "*";
};

/// Append-only JSON Lines file per session: "turn", "state" and "handoff" events.
/// Every append is fsynced before it returns.
class SessionLog {
public:
    explicit SessionLog(std::filesystem::path dir);

    std::filesystem::path path_for(const std::string& session_id) const;
    bool exists(const std::string& session_id) const;

    void append(const std::string& session_id, const std::vector<json>& events);
    /// Rebuilds a session from its events; a torn final line is ignored.
    /// Throws Error(MissingFile | ParseError).
    dialog::DialogState load(const std::string& session_id) const;

private:
    std::filesystem::path dir_;
};

/// Session-oriented HTTP API over a shared engine. Requests for one session are
/// serialized; different sessions run concurrently.
class Service {
public:
    /// A null engine puts the service in the unavailable state (503 on create),
    /// with `startup_errors` reported in the response body.
    Service(std::shared_ptr<const engine::Engine> engine, Options options,
            std::vector<std::string> startup_errors = {});

    Response create_session(const json& body);
    Response post_message(const std::string& session_id, const json& body);
    Response transcript(const std::string& session_id);
    Response handoff(const std::string& session_id);
    Response health() const;

    /// Registers the /v1 routes and CORS handling.
    void mount(httplib::Server& server);

private:
    struct Session {
        std::mutex mutex;
        dialog::DialogState state;
    };

    std::shared_ptr<Session> find(const std::string& session_id);

    std::shared_ptr<const engine::Engine> engine_;
    Options options_;
    std::vector<std::string> startup_errors_;
    SessionLog log_;
    std::mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace ca::service
