#include "evidex/error.hpp"
#include "evidex/search_engine.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace evidex;

namespace {

std::set<std::string> ids(const ExecutionResult& r) {
    std::set<std::string> out;
    for (const auto& h : r.hits) out.insert(h.doc_id);
    return out;
}

dsl::Request req(dsl::Query q) {
    dsl::Request r;
    r.query = std::move(q);
    return r;
}

struct Corpus {
    SearchEngine engine{default_enron_schema(), std::make_shared<HashingEmbedder>()};
    Corpus() {
        using V = std::vector<std::string>;
        engine.add_document(fixtures::make_doc("a", {"raptor hedge capacity", "please destroy the passes"},
                                               {{"sender", std::string("jeff@enron.com")},
                                                {"sent_date", std::string("2001-05-01T00:00:00Z")},
                                                {"people", V{"Jeff Skilling"}}}));
        engine.add_document(fixtures::make_doc("b", {"raptor losses and destroy the documents"},
                                               {{"sender", std::string("andy@enron.com")},
                                                {"sent_date", std::string("2001-10-01T00:00:00Z")}}));
        engine.add_document(fixtures::make_doc("c", {"gas trading desk update"},
                                               {{"sender", std::string("jeff@enron.com")},
                                                {"sent_date", std::string("2000-02-01T00:00:00Z")}}));
    }
};

} // namespace

TEST_CASE("bool semantics") {
    Corpus c;
    auto& e = c.engine;
    CHECK(ids(e.execute(req(dsl::Match{"body", "raptor"}))) == std::set<std::string>{"a", "b"});
    CHECK(ids(e.execute(req(dsl::Bool{{dsl::Match{"body", "raptor"}}, {}, {dsl::Term{"sender", std::string("andy@enron.com")}}, {}}))) ==
          std::set<std::string>{"a"});
    CHECK(ids(e.execute(req(dsl::Bool{{}, {dsl::Match{"body", "gas"}, dsl::Match{"body", "losses"}}, {}, {}}))) ==
          std::set<std::string>{"b", "c"});
    // should is optional once must is present
    CHECK(ids(e.execute(req(dsl::Bool{{dsl::Match{"body", "raptor"}}, {dsl::Match{"body", "gas"}}, {}, {}}))) ==
          std::set<std::string>{"a", "b"});
    CHECK(ids(e.execute(req(dsl::Bool{{}, {}, {}, {dsl::Term{"sender", std::string("jeff@enron.com")}}}))) ==
          std::set<std::string>{"a", "c"});
    CHECK(ids(e.execute(req(dsl::Term{"people", std::string("Jeff Skilling")}))) == std::set<std::string>{"a"});
}

TEST_CASE("range on dates is inclusive") {
    Corpus c;
    auto r = c.engine.execute(req(dsl::Range{"sent_date", std::string("2001-05-01"), std::string("2001-10-01")}));
    CHECK(ids(r) == std::set<std::string>{"a", "b"});
}

TEST_CASE("nested clauses bind to one segment") {
    Corpus c;
    dsl::Bool both{{dsl::Match{"segments.segment_text", "raptor"}, dsl::Match{"segments.segment_text", "destroy"}}, {}, {}, {}};
    CHECK(ids(c.engine.execute(req(dsl::Nested{"segments", dsl::Query(both)}))) == std::set<std::string>{"b"});
    dsl::Bool flat{{dsl::Match{"body", "raptor"}, dsl::Match{"body", "destroy"}}, {}, {}, {}};
    CHECK(ids(c.engine.execute(req(flat))) == std::set<std::string>{"a", "b"});
}

TEST_CASE("knn returns the best segment per document") {
    Corpus c;
    auto r = c.engine.execute(req(dsl::Nested{"segments", dsl::Query(dsl::Knn{"segments.segment_vector", "destroy the passes", 2})}));
    REQUIRE(r.hits.size() == 2);
    for (const auto& h : r.hits) {
        CHECK(h.semantic_score.has_value());
        CHECK(h.best_segment_ordinal.has_value());
        if (h.doc_id == "a") CHECK(*h.best_segment_ordinal == 1);
    }
}

TEST_CASE("lexical scores add across clauses") {
    Corpus c;
    auto one = c.engine.execute(req(dsl::Match{"body", "raptor"}));
    auto two = c.engine.execute(req(dsl::Bool{{dsl::Match{"body", "raptor"}, dsl::Match{"body", "raptor"}}, {}, {}, {}}));
    for (std::size_t i = 0; i < one.hits.size(); ++i)
        CHECK(*two.hits[i].lexical_score == doctest::Approx(2.0 * *one.hits[i].lexical_score));
}

TEST_CASE("invalid requests are rejected with a trace") {
    Corpus c;
    try {
        c.engine.execute(req(dsl::Match{"nope", "x"}));
        FAIL("expected ValidationFailed");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::ValidationFailed);
    }
}

TEST_CASE("trace reports clause hit counts") {
    Corpus c;
    auto r = c.engine.execute(req(dsl::Bool{{dsl::Match{"body", "raptor"}}, {}, {}, {}}));
    CHECK_FALSE(r.trace.dsl.empty());
    CHECK_FALSE(r.trace.clauses.empty());
    CHECK(r.trace.lexical.count == 2);
    auto j = r.trace.to_json();
    CHECK(j.contains("clauses"));
}

TEST_CASE("engine save and load") {
    fixtures::TempDir tmp;
    Corpus c;
    c.engine.save(tmp.path());
    auto loaded = SearchEngine::load(tmp.path(), std::make_shared<HashingEmbedder>());
    CHECK(loaded->manifest() == c.engine.manifest());
    CHECK(loaded->doc_ids() == c.engine.doc_ids());
    CHECK_FALSE(c.engine.add_document(fixtures::make_doc("a", {"again"})));
}
