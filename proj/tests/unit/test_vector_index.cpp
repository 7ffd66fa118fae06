#include "evidex/error.hpp"
#include "evidex/vector_index.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace evidex;

namespace {

std::vector<std::vector<float>> fill(VectorIndex& idx, std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::vector<std::vector<float>> data;
    for (std::size_t i = 0; i < n; ++i) {
        data.push_back(fixtures::random_unit(rng));
        idx.insert_vector({{"d" + std::to_string(i), 0}, EmbeddingVector::from_unit(data.back())});
    }
    return data;
}

} // namespace

TEST_CASE("empty index returns nothing") {
    VectorIndex idx;
    CHECK(idx.knn_search(EmbeddingVector::basis(0), 5).empty());
    CHECK(idx.inspect().top_layer == -1);
}

TEST_CASE("exact search agrees with brute force") {
    VectorIndex idx;
    auto data = fill(idx, 200, 1);
    std::mt19937_64 rng(2);
    auto q = fixtures::random_unit(rng);
    auto want = oracle::exact_knn(data, q, 7);
    auto got = idx.exact_knn(EmbeddingVector::from_unit(q), 7);
    REQUIRE(got.size() == 7);
    for (std::size_t i = 0; i < 7; ++i) {
        CHECK(got[i].key.doc_id == "d" + std::to_string(want[i]));
        CHECK(got[i].cosine == doctest::Approx(oracle::dot(data[want[i]], q)).epsilon(1e-6));
    }
}

TEST_CASE("graph invariants hold") {
    VectorIndex idx;
    fill(idx, 500, 3);
    auto r = idx.inspect();
    CHECK(r.nodes == 500);
    CHECK(r.reachable == 500);
    CHECK(r.degree_violations == 0);
    CHECK(r.dangling_links == 0);
}

TEST_CASE("construction is reproducible") {
    VectorIndex a, b;
    fill(a, 300, 4);
    fill(b, 300, 4);
    CHECK(a.manifest() == b.manifest());
    std::mt19937_64 rng(5);
    auto q = EmbeddingVector::from_unit(fixtures::random_unit(rng));
    CHECK(a.knn_search(q, 10) == b.knn_search(q, 10));
}

TEST_CASE("a stored vector finds itself first") {
    VectorIndex idx;
    auto data = fill(idx, 300, 6);
    for (std::size_t i : {0u, 17u, 299u}) {
        auto r = idx.knn_search(EmbeddingVector::from_unit(data[i]), 1);
        REQUIRE(r.size() == 1);
        CHECK(r[0].key.doc_id == "d" + std::to_string(i));
    }
}

TEST_CASE("duplicate keys are rejected") {
    VectorIndex idx;
    idx.insert_vector({{"a", 0}, EmbeddingVector::basis(0)});
    CHECK_THROWS_AS(idx.insert_vector({{"a", 0}, EmbeddingVector::basis(1)}), Error);
    idx.insert_vector({{"a", 1}, EmbeddingVector::basis(1)});
    CHECK(idx.size() == 2);
    CHECK(idx.vector_of({"a", 1}) == EmbeddingVector::basis(1));
}

TEST_CASE("save and load keep the graph") {
    fixtures::TempDir tmp;
    VectorIndex idx;
    fill(idx, 150, 7);
    idx.save(tmp.path());
    auto loaded = VectorIndex::load(tmp.path());
    CHECK(loaded->size() == 150);
    std::mt19937_64 rng(8);
    auto q = EmbeddingVector::from_unit(fixtures::random_unit(rng));
    CHECK(loaded->knn_search(q, 10) == idx.knn_search(q, 10));
    CHECK(loaded->manifest() == idx.manifest());
}
