#include "evidex/error.hpp"
#include "evidex/fusion.hpp"

#include <doctest.h>

using namespace evidex;

namespace {

ScoredHit lex(const std::string& id, double s) { return {id, s, std::nullopt, std::nullopt, std::nullopt}; }
ScoredHit sem(const std::string& id, double s) { return {id, std::nullopt, s, 0, std::nullopt}; }

std::vector<std::string> order(const std::vector<FusedResult>& r) {
    std::vector<std::string> out;
    for (const auto& x : r) out.push_back(x.doc_id);
    return out;
}

} // namespace

TEST_CASE("min-max normalization") {
    std::vector<double> v{2.0, 4.0, 3.0};
    CHECK(normalize_minmax(v) == std::vector<double>{0.0, 1.0, 0.5});
    std::vector<double> c{0.7, 0.7};
    CHECK(normalize_minmax(c) == std::vector<double>{1.0, 1.0});
    std::vector<double> z{-0.2};
    CHECK(normalize_minmax(z) == std::vector<double>{0.0});
    CHECK(normalize_minmax({}).empty());
}

TEST_CASE("hybrid combines normalized scores") {
    std::vector<ScoredHit> l{lex("a", 10), lex("b", 5), lex("c", 0)};
    std::vector<ScoredHit> s{sem("c", 0.9), sem("d", 0.1)};
    auto r = fuse_hybrid(l, s, {FusionMode::Hybrid, 0.5, 0.5, 1000});
    // a: .5*1 = .5   b: .5*.5 = .25   c: .5*0 + .5*1 = .5   d: 0
    CHECK(order(r) == std::vector<std::string>{"a", "c", "b", "d"});
    CHECK(r[0].fused_score == doctest::Approx(0.5));
    CHECK(r[0].rank == 1);
    CHECK(r[2].fused_score == doctest::Approx(0.25));
}

TEST_CASE("weights are normalized") {
    std::vector<ScoredHit> l{lex("a", 1), lex("b", 2)};
    std::vector<ScoredHit> s{sem("a", 0.9), sem("b", 0.1)};
    auto x = fuse_hybrid(l, s, {FusionMode::Hybrid, 1, 3, 1000});
    auto y = fuse_hybrid(l, s, {FusionMode::Hybrid, 0.25, 0.75, 1000});
    CHECK(order(x) == order(y));
    CHECK(x[0].fused_score == doctest::Approx(y[0].fused_score));
}

TEST_CASE("pure modes ignore the other list") {
    std::vector<ScoredHit> l{lex("a", 1)};
    std::vector<ScoredHit> s{sem("b", 0.5)};
    CHECK(order(fuse_hybrid(l, s, {FusionMode::LexicalOnly, 1, 0, 1000})) == std::vector<std::string>{"a"});
    CHECK(order(fuse_hybrid(l, s, {FusionMode::SemanticOnly, 0, 1, 1000})) == std::vector<std::string>{"b"});
}

TEST_CASE("candidate pool cuts each list") {
    std::vector<ScoredHit> l{lex("a", 3), lex("b", 2), lex("c", 1)};
    auto r = fuse_hybrid(l, {}, {FusionMode::LexicalOnly, 1, 0, 2});
    CHECK(order(r) == std::vector<std::string>{"a", "b"});
}

TEST_CASE("invalid configs") {
    CHECK_THROWS_AS(validate_fusion({FusionMode::Hybrid, 0, 0, 10}), Error);
    CHECK_THROWS_AS(validate_fusion({FusionMode::Hybrid, -1, 2, 10}), Error);
    CHECK_THROWS_AS(validate_fusion({FusionMode::Hybrid, 1, 1, 0}), Error);
    CHECK_NOTHROW(validate_fusion({FusionMode::Hybrid, 0, 1, 10}));
}

TEST_CASE("fusion json") {
    FusionConfig c{FusionMode::SemanticOnly, 0.0, 1.0, 50};
    CHECK(fusion_from_json(fusion_to_json(c)) == c);
    CHECK_THROWS_AS(fusion_from_json({{"mode", "bogus"}}), Error);
    CHECK_THROWS_AS(fusion_from_json({{"mode", "hybrid"}, {"extra", 1}}), Error);
}

TEST_CASE("split by mode") {
    std::vector<ScoredHit> hits{lex("a", 1), sem("b", 0.2), {"c", 1.0, 0.3, 0, std::nullopt}};
    auto m = split_by_mode(hits);
    CHECK(m.lexical.size() == 2);
    CHECK(m.semantic.size() == 2);
}
