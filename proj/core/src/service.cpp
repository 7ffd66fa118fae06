#include "evidex/service.hpp"

#include "evidex/error.hpp"

#include "detail/utf8.hpp"

#include <httplib.h>

#include <cstdio>

namespace evidex {
namespace {

using json = nlohmann::json;

constexpr std::size_t kSnippetChars = 240;

std::vector<std::string> split_path(std::string_view path) {
    std::vector<std::string> parts;
    std::size_t i = 0;
    while (i < path.size()) {
        while (i < path.size() && path[i] == '/') ++i;
        auto j = path.find('/', i);
        if (j == std::string_view::npos) j = path.size();
        if (j > i) parts.emplace_back(path.substr(i, j - i));
        i = j;
    }
    return parts;
}

json parse_body(const std::string& body) {
    if (body.empty()) return json::object();
    auto j = json::parse(body, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::ParseError, "request body is not JSON", {{"json_path", "$"}});
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "request body must be an object", {{"json_path", "$"}});
    return j;
}

template <typename T>
std::optional<T> body_field(const json& body, const char* key) {
    if (!body.contains(key) || body[key].is_null()) return std::nullopt;
    try {
        return body[key].get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::ParseError, std::string("wrong type for '") + key + "'",
                    {{"json_path", std::string("$.") + key}});
    }
}

std::string snippet(const Document& doc, std::optional<int> ordinal) {
    const Segment* seg = nullptr;
    for (const auto& s : doc.segments) {
        if (ordinal && s.ordinal == *ordinal) seg = &s;
    }
    if (!seg && !doc.segments.empty()) seg = &doc.segments.front();
    if (!seg) return {};
    auto cps = detail::decode_utf8_lenient(seg->text);
    if (cps.size() <= kSnippetChars) return seg->text;
    return detail::encode_utf8(std::u32string_view(cps).substr(0, kSnippetChars)) + "...";
}

std::string content_hash(const Document& doc) {
    std::string body;
    if (auto it = doc.fields.find("body"); it != doc.fields.end()) {
        if (const auto* s = std::get_if<std::string>(&it->second)) body = *s;
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(body)));
    return buf;
}

json session_summary(const QuerySession& s) {
    return {{"session_id", s.session_id},
            {"parent_session_id", s.parent_session_id ? json(*s.parent_session_id) : json(nullptr)},
            {"created_at", s.created_at},
            {"nl_query", s.nl_query ? json(*s.nl_query) : json(nullptr)},
            {"translator_kind", std::string(to_string(s.translator_kind))},
            {"fusion", fusion_to_json(s.fusion)},
            {"total_results", s.results.size()}};
}

HttpReply reply(int status, const json& body) { return {status, body.dump(), "application/json"}; }

} // namespace

int http_status(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NotFound: return 404;
    case ErrorCode::ParseError:
    case ErrorCode::ValidationFailed:
    case ErrorCode::UnknownField:
    case ErrorCode::EmptyIntent:
    case ErrorCode::AuditReject:
    case ErrorCode::UntranslatableResponse:
    case ErrorCode::InvalidFusionConfig: return 422;
    case ErrorCode::InvalidArgument:
    case ErrorCode::SynonymConflict: return 400;
    case ErrorCode::EmbedderUnavailable:
    case ErrorCode::TranslatorUnavailable:
    case ErrorCode::QueueUnavailable: return 503;
    default: return 500;
    }
}

json error_envelope(const Error& e) {
    return {{"error", {{"code", std::string(to_string(e.code()))}, {"message", e.what()}, {"details", e.details()}}}};
}

struct Service::Server {
    httplib::Server http;
};

Service::Service(std::shared_ptr<Workspace> workspace, std::string cors_origin)
    : workspace_(std::move(workspace)), cors_origin_(std::move(cors_origin)) {}

Service::~Service() = default;

HttpReply Service::handle(std::string_view method, std::string_view path, const std::string& body,
                          const std::map<std::string, std::string>& params) {
    try {
        auto& ws = *workspace_;
        const auto parts = split_path(path);
        const auto n = parts.size();
        auto not_found = [&] {
            return Error(ErrorCode::NotFound, "no such route", {{"method", std::string(method)}, {"path", std::string(path)}});
        };

        if (n == 1 && parts[0] == "healthz" && method == "GET") {
            return reply(200, {{"status", "ok"}, {"cases", ws.cases().size()}});
        }
        if (n == 0 || parts[0] != "cases") throw not_found();

        if (n == 1) {
            if (method == "GET") {
                json out = json::array();
                for (const auto& c : ws.cases()) out.push_back(case_to_json(c));
                return reply(200, {{"cases", out}});
            }
            if (method == "POST") {
                auto b = parse_body(body);
                auto corpus = body_field<std::string>(b, "corpus_ref");
                if (!corpus) throw Error(ErrorCode::InvalidArgument, "corpus_ref is required", {{"json_path", "$.corpus_ref"}});
                auto c = ws.create_case(body_field<std::string>(b, "title").value_or(""), *corpus);
                return reply(201, case_to_json(c));
            }
            throw not_found();
        }

        const auto& case_id = parts[1];
        if (n == 2) {
            if (method == "GET") {
                auto c = ws.get_case(case_id);
                auto j = case_to_json(c);
                j["session_count"] = ws.sessions(case_id).size();
                return reply(200, j);
            }
            if (method == "PATCH") {
                auto b = parse_body(body);
                auto title = body_field<std::string>(b, "title");
                if (!title) throw Error(ErrorCode::InvalidArgument, "title is required", {{"json_path", "$.title"}});
                return reply(200, case_to_json(ws.rename_case(case_id, *title)));
            }
            throw not_found();
        }

        const auto& section = parts[2];
        if (section == "queries" && n == 3 && method == "POST") {
            ws.get_case(case_id);
            auto b = parse_body(body);
            std::optional<FusionConfig> fusion;
            if (b.contains("fusion") && !b["fusion"].is_null()) fusion = fusion_from_json(b["fusion"]);
            std::optional<TranslatorKind> kind;
            if (auto t = body_field<std::string>(b, "translator")) {
                kind = translator_kind_from_string(*t);
                if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown translator", {{"json_path", "$.translator"}});
            }
            auto parent = body_field<std::string>(b, "parent_session_id");
            auto nl = body_field<std::string>(b, "nl_query");
            const bool has_dsl = b.contains("dsl") && !b["dsl"].is_null();
            if (nl.has_value() == has_dsl)
                throw Error(ErrorCode::InvalidArgument, "exactly one of nl_query or dsl is required");

            QuerySession s;
            if (has_dsl) {
                json dsl = b["dsl"];
                if (dsl.is_string()) {
                    dsl = json::parse(dsl.get<std::string>(), nullptr, false);
                    if (dsl.is_discarded()) throw Error(ErrorCode::ParseError, "dsl is not JSON", {{"json_path", "$"}});
                }
                s = ws.submit_dsl_query(case_id, dsl, fusion, parent);
            } else {
                s = ws.submit_nl_query(case_id, *nl, fusion, kind, parent);
            }

            const auto& request = s.request;
            int from = body_field<int>(b, "from").value_or(request.value("from", dsl::kDefaultFrom));
            int size = body_field<int>(b, "size").value_or(request.value("size", dsl::kDefaultSize));
            if (from < 0 || size < 0) throw Error(ErrorCode::InvalidArgument, "from and size must be non-negative");
            bool hide_reviewed = body_field<bool>(b, "hide_reviewed").value_or(false);

            auto engine = ws.engine(case_id);
            json page = json::array();
            int skipped = 0;
            for (const auto& r : s.results) {
                if (static_cast<int>(page.size()) >= size) break;
                auto review = ws.review(case_id, r.doc_id);
                if (hide_reviewed && review.status != ReviewStatus::Unreviewed) continue;
                if (skipped++ < from) continue;
                auto doc = engine->document(r.doc_id);
                json subject = nullptr;
                if (doc) {
                    if (auto it = doc->fields.find("subject"); it != doc->fields.end())
                        if (const auto* v = std::get_if<std::string>(&it->second)) subject = *v;
                }
                page.push_back({{"rank", r.rank},
                                {"doc_id", r.doc_id},
                                {"fused_score", r.fused_score},
                                {"lexical_score", r.lexical_score ? json(*r.lexical_score) : json(nullptr)},
                                {"semantic_score", r.semantic_score ? json(*r.semantic_score) : json(nullptr)},
                                {"subject", subject},
                                {"snippet", doc ? snippet(*doc, r.best_segment_ordinal) : std::string()},
                                {"review", std::string(to_string(review.status))}});
            }
            return reply(201, {{"session", session_to_json(s)}, {"results", page}, {"from", from}, {"size", size}});
        }

        if (section == "sessions" && method == "GET") {
            ws.get_case(case_id);
            if (n == 3) {
                json out = json::array();
                for (const auto& s : ws.sessions(case_id)) out.push_back(session_summary(s));
                return reply(200, {{"sessions", out}});
            }
            if (n == 4) {
                auto s = ws.session(case_id, parts[3]);
                if (!s) throw Error(ErrorCode::NotFound, "unknown session", {{"case_id", case_id}, {"session_id", parts[3]}});
                return reply(200, session_to_json(*s));
            }
            throw not_found();
        }

        if (section == "documents" && n >= 4) {
            const bool review_route = parts.back() == "review" && n >= 5;
            std::string doc_id;
            for (std::size_t i = 3; i < (review_route ? n - 1 : n); ++i) doc_id += (doc_id.empty() ? "" : "/") + parts[i];
            if (review_route && method == "PUT") {
                auto b = parse_body(body);
                auto status_name = body_field<std::string>(b, "status");
                if (!status_name) throw Error(ErrorCode::InvalidArgument, "status is required", {{"json_path", "$.status"}});
                auto status = review_status_from_string(*status_name);
                if (!status)
                    throw Error(ErrorCode::InvalidArgument, "status must be unreviewed, reviewed or flagged",
                                {{"json_path", "$.status"}});
                auto r = ws.set_review(case_id, doc_id, *status, body_field<std::string>(b, "note").value_or(""),
                                       body_field<std::string>(b, "reviewer").value_or(""));
                return reply(200, review_to_json(r));
            }
            if (review_route && method == "GET") return reply(200, review_to_json(ws.review(case_id, doc_id)));
            if (!review_route && method == "GET") {
                auto doc = ws.document(case_id, doc_id);
                if (!doc) throw Error(ErrorCode::NotFound, "unknown document", {{"case_id", case_id}, {"doc_id", doc_id}});
                auto j = document_to_json(*doc);
                j["content_hash"] = content_hash(*doc);
                j["review"] = review_to_json(ws.review(case_id, doc_id));
                return reply(200, j);
            }
            throw not_found();
        }

        if (section == "coverage" && n == 3 && method == "GET") return reply(200, coverage_to_json(ws.coverage(case_id)));
        if (section == "reviews" && n == 3 && method == "GET") {
            ws.get_case(case_id);
            json out = json::array();
            for (const auto& r : ws.reviews(case_id))
                if (!params.contains("status") || params.at("status") == to_string(r.status)) out.push_back(review_to_json(r));
            return reply(200, {{"reviews", out}});
        }
        throw not_found();
    } catch (const Error& e) {
        return reply(http_status(e.code()), error_envelope(e));
    } catch (const std::exception& e) {
        return reply(500, error_envelope(Error(ErrorCode::Io, e.what())));
    }
}

bool Service::run(const std::string& host, int port, const std::function<void(int)>& on_ready) {
    server_ = std::make_unique<Server>();
    auto& http = server_->http;
    const std::string origin = cors_origin_;
    http.set_default_headers({{"Access-Control-Allow-Origin", origin},
                              {"Access-Control-Allow-Methods", "GET, POST, PUT, PATCH, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
        std::map<std::string, std::string> params;
        for (const auto& [k, v] : req.params) params[k] = v;
        auto r = handle(req.method, req.path, req.body, params);
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    const char* any = R"(/.*)";
    http.Get(any, dispatch);
    http.Post(any, dispatch);
    http.Put(any, dispatch);
    http.Patch(any, dispatch);
    http.Options(any, [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

    int bound = port;
    if (port == 0) {
        bound = http.bind_to_any_port(host);
        if (bound < 0) return false;
    } else if (!http.bind_to_port(host, port)) {
        return false;
    }
    if (on_ready) on_ready(bound);
    return http.listen_after_bind();
}

void Service::stop() {
    if (server_) server_->http.stop();
}

} // namespace evidex
