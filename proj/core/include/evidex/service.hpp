#pragma once

#include "evidex/error.hpp"
#include "evidex/workspace.hpp"

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace evidex {

struct HttpReply {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// HTTP status for an error code in the `{"error":{code,message,details}}`
/// envelope: 404 NotFound, 422 for query problems the user can fix, 400 for
/// other bad input, 503 when a backend is unreachable, 500 otherwise.
int http_status(ErrorCode code) noexcept;
nlohmann::json error_envelope(const Error& e);

/// REST front end over a Workspace.
///
///   GET  /healthz
///   POST /cases                                   {title, corpus_ref}
///   GET  /cases
///   GET  /cases/{id}
///   POST /cases/{id}/queries                      {nl_query | dsl, fusion, translator,
///                                                  parent_session_id, from, size, hide_reviewed}
///   GET  /cases/{id}/sessions
///   GET  /cases/{id}/sessions/{sid}
///   GET  /cases/{id}/documents/{doc_id}
///   PUT  /cases/{id}/documents/{doc_id}/review    {status, note, reviewer}
///   GET  /cases/{id}/coverage
///
/// Routing lives in handle() so it can be exercised without a socket.
class Service {
public:
    explicit Service(std::shared_ptr<Workspace> workspace, std::string cors_origin = "*");
    ~Service();
    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    Workspace& workspace() noexcept { return *workspace_; }
    const std::string& cors_origin() const noexcept { return cors_origin_; }

    /// `path` excludes the query string; `params` holds its decoded pairs.
    HttpReply handle(std::string_view method, std::string_view path, const std::string& body,
                     const std::map<std::string, std::string>& params = {});

    /// Serves until stop(). Port 0 picks a free port; `on_ready` receives the
    /// bound port before the accept loop starts. Returns false when binding fails.
    bool run(const std::string& host, int port, const std::function<void(int)>& on_ready = {});
    void stop();

private:
    struct Server;

    std::shared_ptr<Workspace> workspace_;
    std::string cors_origin_;
    std::unique_ptr<Server> server_;
};

} // namespace evidex
