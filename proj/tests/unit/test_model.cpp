#include "evidex/error.hpp"
#include "evidex/model.hpp"
#include "evidex/schema.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace evidex;

TEST_CASE("enron schema has nine valid fields") {
    auto s = default_enron_schema();
    CHECK(s.fields.size() == 9);
    CHECK(validate_schema(s).ok());
    CHECK(s.nested_field() == "segments");
    CHECK(s.resolve("segments.segment_text") == FieldRole::SegmentText);
    CHECK(s.resolve("segments.segment_vector") == FieldRole::SegmentVector);
    CHECK(s.resolve("body") == FieldRole::Text);
    CHECK(s.resolve("sender") == FieldRole::Keyword);
    CHECK(s.resolve("sent_date") == FieldRole::Date);
    CHECK_FALSE(s.resolve("segments.other").has_value());
    CHECK_FALSE(s.resolve("nope").has_value());
}

TEST_CASE("schema json round trip is stable") {
    auto s = default_enron_schema();
    auto j = schema_to_json(s);
    CHECK(schema_from_json(j) == s);
    CHECK(schema_json_text(s) == schema_json_text(schema_from_json(j)));
}

TEST_CASE("schema with two nested fields is invalid") {
    auto s = default_enron_schema();
    s.fields["more"] = FieldType::NestedSegment;
    CHECK_FALSE(validate_schema(s).ok());
}

TEST_CASE("registry bumps versions and rejects invalid updates") {
    SchemaRegistry reg(default_enron_schema());
    const auto v0 = reg.current().version;
    auto fields = reg.current().fields;
    fields["custodian"] = FieldType::Keyword;
    CHECK(reg.update(fields) == v0 + 1);
    CHECK(reg.current().type_of("custodian") == FieldType::Keyword);
    fields["x"] = FieldType::NestedSegment;
    CHECK_THROWS_AS(reg.update(fields), Error);
    CHECK(reg.current().version == v0 + 1);
}

TEST_CASE("document validation") {
    auto schema = default_enron_schema();
    auto doc = fixtures::make_doc("a", {"first segment", "second segment"});
    CHECK(validate_document(doc, schema).ok());

    SUBCASE("unknown field") {
        doc.fields["bogus"] = std::string("x");
        CHECK_FALSE(validate_document(doc, schema).ok());
    }
    SUBCASE("empty segment text") {
        doc.segments[1].text.clear();
        CHECK_FALSE(validate_document(doc, schema).ok());
    }
    SUBCASE("out of order ordinals") {
        std::swap(doc.segments[0].ordinal, doc.segments[1].ordinal);
        CHECK_FALSE(validate_document(doc, schema).ok());
    }
    SUBCASE("bad date") {
        doc.fields["sent_date"] = std::string("yesterday");
        CHECK_FALSE(validate_document(doc, schema).ok());
    }
}

TEST_CASE("document json round trip") {
    auto doc = fixtures::make_doc("a", {"alpha beta", "gamma"},
                                  {{"people", std::vector<std::string>{"Jeff Skilling", "Ken Lay"}}});
    auto back = document_from_json(document_to_json(doc));
    CHECK(back.doc_id == doc.doc_id);
    CHECK(back.fields == doc.fields);
    REQUIRE(back.segments.size() == 2);
    CHECK(back.segments[1].text == "gamma");
    CHECK(back.segments[1].span == doc.segments[1].span);
    // vectors live in the vector index, not in the document record
    CHECK(document_to_json(doc).dump().find("vector") == std::string::npos);
}

TEST_CASE("embedding vectors are unit norm") {
    std::vector<double> raw(kEmbeddingDim, 0.0);
    raw[3] = 4.0;
    raw[7] = 3.0;
    auto v = EmbeddingVector::normalize(std::span<const double>(raw));
    CHECK(v[3] == doctest::Approx(0.8));
    CHECK(v[7] == doctest::Approx(0.6));
    CHECK(is_unit_norm(v.values()));

    std::vector<double> zero(kEmbeddingDim, 0.0);
    CHECK(EmbeddingVector::normalize(std::span<const double>(zero)) == EmbeddingVector::basis(0));

    std::vector<float> not_unit(kEmbeddingDim, 1.0f);
    CHECK_THROWS_AS(EmbeddingVector::from_unit(not_unit), Error);
    std::vector<float> short_vec(10, 0.0f);
    short_vec[0] = 1.0f;
    CHECK_THROWS_AS(EmbeddingVector::from_unit(short_vec), Error);
}

TEST_CASE("error carries code and details") {
    Error e(ErrorCode::AuditReject, "nope", {{"rule_id", "R1"}});
    CHECK(e.code() == ErrorCode::AuditReject);
    CHECK(e.details()["rule_id"] == "R1");
    CHECK(to_string(ErrorCode::AuditReject) == "AuditReject");
}
