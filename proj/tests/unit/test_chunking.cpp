#include "evidex/chunking.hpp"
#include "evidex/error.hpp"

#include <doctest.h>

#include <random>

using namespace evidex;

namespace {

void check_tiling(std::string_view text, const std::vector<Chunk>& chunks) {
    std::size_t pos = 0;
    for (const auto& c : chunks) {
        CHECK(c.span.start == pos);
        CHECK(c.span.end > c.span.start);
        pos = c.span.end;
    }
    if (!chunks.empty()) CHECK(pos == text.size());
}

std::string words(int n, const char* w = "word") {
    std::string out;
    for (int i = 0; i < n; ++i) out += std::string(w) + (i % 10 == 9 ? ". " : " ");
    return out;
}

} // namespace

TEST_CASE("word counting") {
    CHECK(count_words("") == 0);
    CHECK(count_words("  one two\n three ") == 3);
}

TEST_CASE("short paragraphs merge up to the target") {
    ChunkProfile p;
    p.target_words = 6;
    p.max_words = 12;
    std::string text = "one two three\n\nfour five six\n\nseven eight";
    auto chunks = chunk_heuristic(text, p);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[0].text == "one two three\n\nfour five six");
    CHECK(chunks[1].text == "seven eight");
    check_tiling(text, chunks);
}

TEST_CASE("long paragraphs split at sentence ends") {
    ChunkProfile p;
    p.target_words = 20;
    p.max_words = 25;
    auto text = words(60);
    auto chunks = chunk_heuristic(text, p);
    CHECK(chunks.size() >= 3);
    for (const auto& c : chunks) {
        CHECK(count_words(c.text) <= 25);
        CHECK(c.text.back() == '.');
    }
    check_tiling(text, chunks);
}

TEST_CASE("boundary patterns split speaker turns") {
    ChunkProfile p;
    p.target_words = 4;
    p.max_words = 10;
    std::string text = "Ken: we need capacity\nJeff: agreed\n10:30 follow up tomorrow";
    auto chunks = chunk_heuristic(text, p);
    CHECK(chunks.size() == 3);
    check_tiling(text, chunks);
}

TEST_CASE("overlap prefixes previous words without touching spans") {
    ChunkProfile p;
    p.target_words = 3;
    p.max_words = 10;
    p.overlap_words = 2;
    std::string text = "a b c\n\nd e f";
    auto chunks = chunk_heuristic(text, p);
    REQUIRE(chunks.size() == 2);
    CHECK(chunks[1].text == "b c d e f");
    check_tiling(text, chunks);
}

TEST_CASE("random bodies tile") {
    std::mt19937 rng(9);
    const char* pieces[] = {"alpha", "beta.", "\n\n", "\n", "Ken:", "gamma?", "  "};
    for (int i = 0; i < 50; ++i) {
        std::string text;
        for (int w = static_cast<int>(rng() % 800); w > 0; --w) text += std::string(pieces[rng() % 7]) + " ";
        check_tiling(text, chunk_heuristic(text, {40, 60, ChunkProfile::default_boundary_patterns(), 0}));
    }
}

TEST_CASE("profile validation and json") {
    ChunkProfile bad;
    bad.target_words = 500;
    bad.max_words = 100;
    CHECK_THROWS_AS(validate_profile(bad), Error);
    ChunkProfile re;
    re.boundary_patterns = {"("};
    CHECK_THROWS_AS(validate_profile(re), Error);
    ChunkProfile p;
    p.target_words = 50;
    auto back = profile_from_json(profile_to_json(p));
    CHECK(back.target_words == 50);
    CHECK(back.max_words == p.max_words);
    CHECK_THROWS_AS(profile_from_json({{"bogus", 1}}), Error);
}
