#include "evidex/error.hpp"
#include "evidex/query_dsl.hpp"

#include <doctest.h>

using namespace evidex;
using json = nlohmann::json;

TEST_CASE("parse the full grammar") {
    auto r = dsl::parse_request(R"({
        "query": {"bool": {
            "must": [{"match": {"body": "raptor"}},
                     {"nested": {"path": "segments", "query":
                        {"knn": {"segments.segment_vector": {"query_text": "hedge losses", "k": 50}}}}}],
            "filter": [{"term": {"sender": "jeff.skilling@enron.com"}},
                       {"range": {"sent_date": {"gte": "2001-01-01", "lte": "2001-12-31"}}}],
            "must_not": [{"term": {"folder": "deleted_items"}}]}},
        "size": 20, "from": 5,
        "fusion": {"mode": "hybrid", "w_lex": 0.3, "w_sem": 0.7}})");
    CHECK(r.size == 20);
    CHECK(r.from == 5);
    REQUIRE(r.fusion);
    CHECK(r.fusion->w_sem == doctest::Approx(0.7));
    const auto& b = r.query.as<dsl::Bool>();
    REQUIRE(b.must.size() == 2);
    const auto& nested = b.must[1].as<dsl::Nested>();
    CHECK(nested.path == "segments");
    CHECK(nested.query->as<dsl::Knn>().k == 50);
    CHECK(b.filter[1].as<dsl::Range>().gte == dsl::Scalar(std::string("2001-01-01")));
    CHECK(dsl::validate(r, default_enron_schema()).ok());
}

TEST_CASE("serialization round trips and is canonical") {
    dsl::Request r;
    r.query = dsl::Bool{{dsl::Match{"body", "x"}}, {dsl::Term{"sender", std::string("a@b")}}, {}, {}};
    auto text = dsl::serialize(r);
    CHECK(dsl::parse_request(text) == r);
    CHECK(dsl::serialize(dsl::parse_request(text)) == text);
    CHECK(text.find(' ') == std::string::npos);
    CHECK(text.find("must_not") == std::string::npos);
}

TEST_CASE("integers survive as integers") {
    auto q = dsl::parse_query_node(json::parse(R"({"term": {"n": 42}})"), "$.query");
    CHECK(q.as<dsl::Term>().value == dsl::Scalar(std::int64_t{42}));
}

TEST_CASE("parse errors carry a json path") {
    auto path_of = [](const std::string& text) {
        try {
            dsl::parse_request(text);
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::ParseError);
            return e.details().value("json_path", std::string());
        }
        return std::string("no error");
    };
    CHECK(path_of(R"({"query": {"bool": {"must": [{"wildcard": {"body": "x*"}}]}}})") .rfind("$.query.bool.must[0]", 0) == 0);
    CHECK(path_of(R"({"query": {"match": {"body": 3}}})").rfind("$.query.match", 0) == 0);
    CHECK(path_of(R"({"query": {}, "sizes": 3})") != "no error");
    CHECK(path_of("not json") != "no error");
    CHECK(path_of(R"({"query": {"match": {"body": "x"}}, "size": -1})") != "no error");
}

TEST_CASE("validation catches field misuse") {
    auto schema = default_enron_schema();
    auto check = [&](const char* text) { return dsl::validate(dsl::parse_request(text), schema); };
    CHECK_FALSE(check(R"({"query": {"match": {"nope": "x"}}})").ok());
    CHECK_FALSE(check(R"({"query": {"range": {"subject": {"gte": "a"}}}})").ok());
    CHECK_FALSE(check(R"({"query": {"match": {"segments.segment_text": "x"}}})").ok());
    CHECK_FALSE(check(R"({"query": {"knn": {"segments.segment_vector": {"query_text": "x"}}}})").ok());
    CHECK_FALSE(check(R"({"query": {"nested": {"path": "attachments", "query": {"match": {"body": "x"}}}}})").ok());
    CHECK_FALSE(check(R"({"query": {"range": {"sent_date": {"gte": "last week"}}}})").ok());
    CHECK(check(R"({"query": {"nested": {"path": "segments", "query": {"match": {"segments.segment_text": "x"}}}}})").ok());
}

TEST_CASE("date literals") {
    CHECK(dsl::is_date_literal("2001-10-22"));
    CHECK(dsl::is_date_literal("2001-10-22T08:00:00Z"));
    CHECK_FALSE(dsl::is_date_literal("2001-13-22"));
    CHECK_FALSE(dsl::is_date_literal("22/10/2001"));
}

TEST_CASE("grammar schema is valid json") {
    auto j = json::parse(dsl::grammar_json_schema());
    CHECK(j.is_object());
}
