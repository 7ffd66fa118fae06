#include "evidex/error.hpp"
#include "evidex/workspace.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace evidex;
using json = nlohmann::json;

namespace {

void write_corpus(const std::filesystem::path& dir) {
    const char* bodies[] = {"Raptor hedges are underwater.", "Shred the audit documents today.",
                            "Gas desk numbers attached.", "Raptor capacity is gone; call Andy."};
    for (int i = 0; i < 4; ++i)
        fixtures::write_file(dir / (std::to_string(i) + "."),
                             "Message-ID: <w" + std::to_string(i) + "@test>\nFrom: kenneth.lay@enron.com\n"
                             "To: jeff.skilling@enron.com\nSubject: s" + std::to_string(i) + "\n\n" + bodies[i] + "\n");
}

} // namespace

TEST_CASE("cases, sessions and reviews persist") {
    fixtures::TempDir tmp;
    write_corpus(tmp / "corpus");
    std::string case_id, sid;
    {
        Workspace ws(tmp / "ws");
        auto c = ws.create_case("Raptor", (tmp / "corpus").string());
        case_id = c.case_id;
        CHECK(c.document_count == 4);
        CHECK(c.schema_version == 2);
        auto s = ws.submit_nl_query(case_id, "raptor", std::nullopt, std::nullopt);
        sid = s.session_id;
        CHECK(s.translator_kind == TranslatorKind::RuleBased);
        CHECK(s.pre_audit_query.has_value());
        CHECK(s.results.size() >= 2);
        CHECK(s.snapshot_documents == 4);
        auto child = ws.submit_dsl_query(case_id, json::parse(R"({"query":{"match":{"body":"shred"}}})"),
                                         FusionConfig{FusionMode::LexicalOnly, 1, 0, 1000}, sid);
        CHECK(child.parent_session_id == sid);
        CHECK(child.translator_kind == TranslatorKind::Manual);
        REQUIRE(child.results.size() == 1);
        ws.set_review(case_id, "w1@test", ReviewStatus::Flagged, "shredding");
        ws.rename_case(case_id, "Raptor II");
    }
    Workspace ws(tmp / "ws");
    CHECK(ws.get_case(case_id).title == "Raptor II");
    CHECK(ws.sessions(case_id).size() == 2);
    auto s = ws.session(case_id, sid);
    REQUIRE(s);
    std::vector<std::string> stored;
    for (const auto& r : s->results) stored.push_back(r.doc_id);
    CHECK(ws.replay_session(case_id, sid) == stored);
    CHECK(ws.review(case_id, "w1@test").status == ReviewStatus::Flagged);
    CHECK(ws.review(case_id, "w0@test").status == ReviewStatus::Unreviewed);
    auto cov = ws.coverage(case_id);
    CHECK(cov.total_docs == 4);
    CHECK(cov.flagged == 1);
    CHECK(cov.sessions.size() == 2);
}

TEST_CASE("session json round trip") {
    QuerySession s;
    s.session_id = "s-000001";
    s.case_id = "case-000001";
    s.nl_query = "raptor";
    s.translator_kind = TranslatorKind::RuleBased;
    s.request = json::parse(R"({"query":{"match":{"body":"raptor"}}})");
    s.results.push_back({1, "a", 0.5, 1.0, 0.0, 2.5, std::nullopt, std::nullopt});
    s.corrections.push_back({"R3", "$.query", json{}, json{}, "moved"});
    auto j = session_to_json(s);
    CHECK(session_to_json(session_from_json(j)) == j);
}

TEST_CASE("error paths") {
    fixtures::TempDir tmp;
    write_corpus(tmp / "corpus");
    Workspace ws(tmp / "ws");
    CHECK_THROWS_AS(ws.create_case("x", (tmp / "nope").string()), Error);
    auto c = ws.create_case("x", (tmp / "corpus").string());
    auto code = [](auto&& fn) {
        try {
            fn();
        } catch (const Error& e) {
            return e.code();
        }
        return ErrorCode::Io;
    };
    CHECK(code([&] { ws.get_case("case-999999"); }) == ErrorCode::NotFound);
    CHECK(code([&] { ws.submit_nl_query(c.case_id, "   ", std::nullopt, std::nullopt); }) == ErrorCode::EmptyIntent);
    CHECK(code([&] { ws.submit_dsl_query(c.case_id, json::parse(R"({"query":{"match":{"nope":"x"}}})"), std::nullopt); }) ==
          ErrorCode::ValidationFailed);
    CHECK(code([&] { ws.submit_dsl_query(c.case_id, json::parse(R"({"query":{"match":{"body":"x"}}})"), std::nullopt, "s-404"); }) ==
          ErrorCode::NotFound);
    CHECK(code([&] { ws.set_review(c.case_id, "missing@test", ReviewStatus::Reviewed); }) == ErrorCode::NotFound);
    CHECK(code([&] { ws.submit_nl_query(c.case_id, "raptor", FusionConfig{FusionMode::Hybrid, 0, 0, 10}, std::nullopt); }) ==
          ErrorCode::InvalidFusionConfig);
}

TEST_CASE("ingest_case adds to an existing case") {
    fixtures::TempDir tmp;
    write_corpus(tmp / "corpus");
    Workspace ws(tmp / "ws");
    auto [c, report] = ws.ingest_case("desk", (tmp / "corpus").string(), {}, 2);
    CHECK(c.case_id == "desk");
    CHECK(report.indexed == 4);
    auto [c2, again] = ws.ingest_case("desk", (tmp / "corpus").string(), {}, 1);
    CHECK(again.duplicates == 4);
    CHECK(c2.document_count == 4);
}
