#include "evidex/error.hpp"
#include "evidex/lexical_index.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace evidex;

TEST_CASE("idf matches the closed form") {
    CHECK(bm25_idf(10, 1) == doctest::Approx(std::log(1.0 + 9.5 / 1.5)));
    CHECK(bm25_idf(10, 10) > 0.0);
}

TEST_CASE("scores agree with the brute-force reference") {
    LexicalIndex idx(default_enron_schema());
    std::vector<std::pair<std::string, std::string>> docs = {
        {"a", "raptor raptor hedge"}, {"b", "raptor loss"}, {"c", "unrelated memo about gas"}, {"d", "hedge hedge hedge"}};
    for (const auto& [id, text] : docs) idx.index_document(fixtures::make_doc(id, {text}));
    auto got = idx.search_lexical({{"body", {"raptor"}}, {"body", {"hedge"}}}, 10);
    auto want = oracle::bm25(docs, {{"raptor"}, {"hedge"}});
    REQUIRE(got.size() == want.size());
    for (std::size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].doc_id == want[i].id);
        CHECK(*got[i].lexical_score == doctest::Approx(want[i].score).epsilon(1e-12));
    }
}

TEST_CASE("synonym alternatives take the max, not the sum") {
    LexicalIndex idx(default_enron_schema());
    std::vector<std::pair<std::string, std::string>> docs = {{"a", "files paperwork"}, {"b", "files"}, {"c", "other"}};
    for (const auto& [id, text] : docs) idx.index_document(fixtures::make_doc(id, {text}));
    auto got = idx.search_lexical({{"body", {"files", "paperwork"}}}, 10);
    auto want = oracle::bm25(docs, {{"files", "paperwork"}});
    REQUIRE(got.size() == 2);
    CHECK(*got[0].lexical_score == doctest::Approx(want[0].score));
    CHECK(*got[1].lexical_score == doctest::Approx(want[1].score));
}

TEST_CASE("ties break by doc_id and k truncates") {
    LexicalIndex idx(default_enron_schema());
    for (const char* id : {"z", "m", "a"}) idx.index_document(fixtures::make_doc(id, {"same text"}));
    auto got = idx.search_lexical({{"body", {"same"}}}, 2);
    REQUIRE(got.size() == 2);
    CHECK(got[0].doc_id == "a");
    CHECK(got[1].doc_id == "m");
}

TEST_CASE("statistics") {
    LexicalIndex idx(default_enron_schema());
    idx.index_document(fixtures::make_doc("a", {"x y z", "x"}));
    idx.index_document(fixtures::make_doc("b", {"y"}));
    CHECK(idx.doc_count() == 2);
    CHECK(idx.segment_count() == 3);
    CHECK(idx.document_frequency("x", "body") == 1);
    CHECK(idx.document_frequency("y", "body") == 2);
    CHECK(idx.term_frequency("x", "body", "a") == 2);
    CHECK(idx.stats("body").avg_field_length() == doctest::Approx(2.5));
    CHECK_THROWS_AS(idx.bm25_term_score("x", "sender", "a"), Error);
}

TEST_CASE("duplicates and schema violations are rejected") {
    LexicalIndex idx(default_enron_schema());
    idx.index_document(fixtures::make_doc("a", {"x"}));
    CHECK_THROWS_AS(idx.index_document(fixtures::make_doc("a", {"y"})), Error);
    auto bad = fixtures::make_doc("b", {"x"});
    bad.fields["nope"] = std::string("1");
    CHECK_THROWS_AS(idx.index_document(bad), Error);
    CHECK(idx.doc_count() == 1);
}

TEST_CASE("segment scoring is per segment") {
    LexicalIndex idx(default_enron_schema());
    idx.index_document(fixtures::make_doc("a", {"raptor", "destroy"}));
    auto scores = idx.score_segments({{"raptor"}, {"destroy"}});
    for (const auto& [ref, s] : scores) CHECK(s > 0.0);
    CHECK(scores.size() == 2);
}

TEST_CASE("save and load preserve scores") {
    fixtures::TempDir tmp;
    LexicalIndex idx(default_enron_schema());
    idx.index_document(fixtures::make_doc("a", {"raptor hedge"}, {{"sender", std::string("x@enron.com")}}));
    idx.index_document(fixtures::make_doc("b", {"hedge"}));
    idx.save(tmp.path());
    auto loaded = LexicalIndex::load(tmp.path());
    auto q = std::vector<QueryTerm>{{"body", {"hedge"}}, {"body", {"raptor"}}};
    auto a = idx.search_lexical(q, 10), b = loaded->search_lexical(q, 10);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(a[i].doc_id == b[i].doc_id);
        CHECK(*a[i].lexical_score == *b[i].lexical_score);
    }
    CHECK(loaded->manifest() == idx.manifest());
    CHECK(loaded->stored_fields(*loaded->doc_number("a")).at("sender") == FieldValue(std::string("x@enron.com")));
}

TEST_CASE("posting size does not depend on insertion order") {
    auto d1 = fixtures::make_doc("a", {"one two three"});
    auto d2 = fixtures::make_doc("b", {"two three four four"});
    LexicalIndex x(default_enron_schema()), y(default_enron_schema());
    x.index_document(d1);
    x.index_document(d2);
    y.index_document(d2);
    y.index_document(d1);
    CHECK(x.posting_bytes() == y.posting_bytes());
}
