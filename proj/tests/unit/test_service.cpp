#include "evidex/service.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace evidex;
using json = nlohmann::json;

namespace {

struct Fixture {
    fixtures::TempDir tmp;
    std::shared_ptr<Workspace> ws;
    std::unique_ptr<Service> svc;

    Fixture() {
        fixtures::write_file(tmp / "corpus/1.", "Message-ID: <a@test>\nFrom: a@enron.com\nSubject: raptor\n\nRaptor hedges are underwater.\n");
        fixtures::write_file(tmp / "corpus/2.", "Message-ID: <b@test>\nFrom: b@enron.com\nSubject: gas\n\nGas desk numbers.\n");
        ws = std::make_shared<Workspace>(tmp / "ws");
        svc = std::make_unique<Service>(ws, "*");
    }
    HttpReply call(const std::string& method, const std::string& path, const json& body = nullptr,
                   std::map<std::string, std::string> params = {}) {
        return svc->handle(method, path, body.is_null() ? "" : body.dump(), params);
    }
};

} // namespace

TEST_CASE("status mapping") {
    CHECK(http_status(ErrorCode::NotFound) == 404);
    CHECK(http_status(ErrorCode::AuditReject) == 422);
    CHECK(http_status(ErrorCode::InvalidArgument) == 400);
    CHECK(http_status(ErrorCode::TranslatorUnavailable) == 503);
    CHECK(http_status(ErrorCode::Io) == 500);
    auto env = error_envelope(Error(ErrorCode::ParseError, "bad", {{"json_path", "$.query"}}));
    CHECK(env["error"]["code"] == "ParseError");
    CHECK(env["error"]["details"]["json_path"] == "$.query");
}

TEST_CASE("case lifecycle over the handler") {
    Fixture f;
    CHECK(f.call("GET", "/healthz").status == 200);
    auto created = f.call("POST", "/cases", {{"title", "t"}, {"corpus_ref", (f.tmp / "corpus").string()}});
    REQUIRE(created.status == 201);
    auto case_id = json::parse(created.body)["case_id"].get<std::string>();
    CHECK(json::parse(f.call("GET", "/cases").body)["cases"].size() == 1);

    auto q = f.call("POST", "/cases/" + case_id + "/queries", {{"nl_query", "raptor"}});
    REQUIRE(q.status == 201);
    auto qj = json::parse(q.body);
    CHECK(qj["results"][0]["doc_id"] == "a@test");
    CHECK(qj["session"]["translation"]["translator_kind"] == "rule_based");

    auto doc = f.call("GET", "/cases/" + case_id + "/documents/a@test");
    CHECK(doc.status == 200);
    CHECK(json::parse(doc.body)["content_hash"].get<std::string>().rfind("fnv1a64:", 0) == 0);

    CHECK(f.call("PUT", "/cases/" + case_id + "/documents/a@test/review", {{"status", "reviewed"}}).status == 200);
    auto cov = json::parse(f.call("GET", "/cases/" + case_id + "/coverage").body);
    CHECK(cov["reviewed"] == 1);
    auto reviews = json::parse(f.call("GET", "/cases/" + case_id + "/reviews", nullptr, {{"status", "reviewed"}}).body);
    CHECK(reviews["reviews"].size() == 1);

    CHECK(f.call("PATCH", "/cases/" + case_id, {{"title", "renamed"}}).status == 200);
    CHECK(json::parse(f.call("GET", "/cases/" + case_id).body)["title"] == "renamed");
}

TEST_CASE("errors use the envelope") {
    Fixture f;
    auto r = f.call("GET", "/cases/none");
    CHECK(r.status == 404);
    CHECK(json::parse(r.body)["error"]["code"] == "NotFound");
    auto created = json::parse(f.call("POST", "/cases", {{"title", "t"}, {"corpus_ref", (f.tmp / "corpus").string()}}).body);
    auto bad = f.call("POST", "/cases/" + created["case_id"].get<std::string>() + "/queries",
                      {{"dsl", {{"query", {{"wildcard", {{"body", "x"}}}}}}}});
    CHECK(bad.status == 422);
    CHECK(json::parse(bad.body)["error"]["details"].contains("json_path"));
    CHECK(f.call("DELETE", "/cases").status >= 400);
    CHECK(f.svc->handle("POST", "/cases", "{not json", {}).status == 422);
}
