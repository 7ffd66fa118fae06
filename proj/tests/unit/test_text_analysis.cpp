#include "evidex/error.hpp"
#include "evidex/text_analysis.hpp"

#include <doctest.h>

using namespace evidex;

TEST_CASE("tokenize lowercases and splits on punctuation") {
    CHECK(tokenize_terms("Raptor-III: LJM2 losses, $500M!") ==
          std::vector<std::string>{"raptor", "iii", "ljm2", "losses", "500m"});
    CHECK(tokenize_terms("").empty());
    CHECK(tokenize_terms("  ...  ").empty());
}

TEST_CASE("no stopwords, no stemming") {
    CHECK(tokenize_terms("the shredding of documents") ==
          std::vector<std::string>{"the", "shredding", "of", "documents"});
}

TEST_CASE("positions are consecutive") {
    auto toks = tokenize("a b, c");
    REQUIRE(toks.size() == 3);
    CHECK(toks[0] == Token{"a", 0});
    CHECK(toks[2] == Token{"c", 2});
}

TEST_CASE("non-ascii letters stay inside tokens") {
    auto t = tokenize_terms("Müller café");
    REQUIRE(t.size() == 2);
    CHECK(t[1] == "café");
}

TEST_CASE("synonym graph expands symmetric groups") {
    SynonymGraph g;
    g.add_group({"documents", "paperwork", "files"});
    CHECK(g.expand("files") == std::set<std::string>{"documents", "paperwork", "files"});
    CHECK(g.expand("memo") == std::set<std::string>{"memo"});
    CHECK_THROWS_AS(g.add_group({"files", "folders"}), Error);
}

TEST_CASE("synonym file parsing skips malformed lines") {
    std::vector<std::string> bad;
    auto g = load_synonym_groups("# comment\nblackout, outage\n\nlonely\ntwo words, x\ncurtail,curtailment\n", &bad);
    CHECK(g.groups().size() == 2);
    CHECK(g.expand("outage").contains("blackout"));
    CHECK(bad.size() == 2);
}
