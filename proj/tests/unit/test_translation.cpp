#include "evidex/error.hpp"
#include "evidex/translation.hpp"

#include "stub_server.hpp"

#include <doctest.h>

#include <atomic>

using namespace evidex;
using json = nlohmann::json;

namespace {

TranslationRequest req(const std::string& nl) { return {nl, default_enron_schema(), "case-1"}; }

bool has(const std::vector<dsl::Query>& v, const dsl::Query& q) { return std::find(v.begin(), v.end(), q) != v.end(); }

} // namespace

TEST_CASE("rule-based grammar") {
    auto t = translate_rule_based(req("from:andrew.fastow@enron.com \"special purpose\" after:2001-01-01 John Lavorato raptor losses"));
    const auto& must = t.query.as<dsl::Bool>().must;
    CHECK(has(must, dsl::Term{"sender", std::string("andrew.fastow@enron.com")}));
    CHECK(has(must, dsl::Match{"body", "special purpose"}));
    CHECK(has(must, dsl::Range{"sent_date", std::string("2001-01-01"), std::nullopt}));
    CHECK(has(must, dsl::Term{"people", std::string("John Lavorato")}));
    REQUIRE(must.back().is<dsl::Bool>());
    const auto& hybrid = must.back().as<dsl::Bool>();
    CHECK(has(hybrid.should, dsl::Match{"body", "raptor losses"}));
    CHECK(hybrid.should.size() == 2);
    CHECK(t.kind == TranslatorKind::RuleBased);
    CHECK(dsl::validate(t.query, default_enron_schema()).ok());
}

TEST_CASE("before and after share one range") {
    auto t = translate_rule_based(req("before:2001-12-31 after:2001-01-01"));
    const auto& must = t.query.as<dsl::Bool>().must;
    REQUIRE(must.size() == 1);
    CHECK(must[0] == dsl::Query(dsl::Range{"sent_date", std::string("2001-01-01"), std::string("2001-12-31")}));
}

TEST_CASE("empty intent") {
    for (const char* nl : {"", "   ", "\"\""}) {
        try {
            translate_rule_based(req(nl));
            FAIL("expected EmptyIntent");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::EmptyIntent);
        }
    }
}

TEST_CASE("translation is deterministic") {
    auto a = translate_rule_based(req("Sherron Watkins accounting scandals"));
    auto b = translate_rule_based(req("Sherron Watkins accounting scandals"));
    CHECK(a.query == b.query);
    CHECK(a.reasoning == b.reasoning);
}

TEST_CASE("prompt holds schema and question only") {
    auto p = build_schema_prompt(req("who shredded documents?"));
    CHECK(p.find(schema_json_text(default_enron_schema())) != std::string::npos);
    CHECK(p.find("who shredded documents?") != std::string::npos);
    CHECK(p.find("segments.segment_vector") != std::string::npos);
    auto retry = build_schema_prompt(req("x"), "NOTE-123");
    CHECK(retry.find("NOTE-123") != std::string::npos);
}

TEST_CASE("fenced block extraction") {
    auto r = extract_last_fenced_block("thinking\n```json\n{\"a\":1}\n```\nmore\n```\n{\"b\":2}\n```\n");
    REQUIRE(r);
    CHECK(json::parse(r->second) == json{{"b", 2}});
    CHECK(r->first.find("thinking") != std::string::npos);
    CHECK_FALSE(extract_last_fenced_block("no block here"));
}

TEST_CASE("remote translator parses, retries once, then gives up") {
    fixtures::StubServer stub;
    std::atomic<int> calls{0};
    std::string reply;
    stub.server().Post("/complete", [&](const httplib::Request&, httplib::Response& res) {
        ++calls;
        res.set_content(json{{"text", reply}}.dump(), "application/json");
    });
    stub.start();
    RemoteTranslator t({stub.url("/complete"), std::chrono::milliseconds(2000), 256, 0.0, 2});

    reply = "Look in the body.\n```json\n{\"query\":{\"match\":{\"body\":\"raptor\"}}}\n```";
    auto ok = t.translate(req("raptor"));
    CHECK(ok.query == dsl::Query(dsl::Match{"body", "raptor"}));
    CHECK(ok.reasoning.find("Look in the body.") != std::string::npos);
    CHECK(ok.kind == TranslatorKind::Remote);
    CHECK(calls == 1);

    reply = "I cannot help with that.";
    calls = 0;
    try {
        t.translate(req("raptor"));
        FAIL("expected UntranslatableResponse");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::UntranslatableResponse);
        CHECK(e.details().dump().find("I cannot help") != std::string::npos);
    }
    CHECK(calls == 2);
}

TEST_CASE("unreachable remote translator") {
    RemoteTranslator t({"http://127.0.0.1:1/complete", std::chrono::milliseconds(200), 64, 0.0, 1});
    try {
        t.translate(req("x"));
        FAIL("expected TranslatorUnavailable");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TranslatorUnavailable);
    }
}
