#include "evidex/vector_index.hpp"

#include <benchmark/benchmark.h>

#include <random>

namespace {

evidex::EmbeddingVector random_unit(std::mt19937_64& rng) {
    std::normal_distribution<double> g;
    std::vector<double> raw(evidex::kEmbeddingDim);
    for (auto& x : raw) x = g(rng);
    return evidex::EmbeddingVector::normalize(std::span<const double>(raw));
}

void BM_HnswInsert(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::vector<evidex::EmbeddingVector> data;
    for (int i = 0; i < state.range(0); ++i) data.push_back(random_unit(rng));
    for (auto _ : state) {
        evidex::VectorIndex index;
        for (std::size_t i = 0; i < data.size(); ++i) index.insert_vector({{std::to_string(i), 0}, data[i]});
        benchmark::DoNotOptimize(index.size());
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_HnswInsert)->Arg(2000)->Unit(benchmark::kMillisecond);

void BM_HnswSearch(benchmark::State& state) {
    std::mt19937_64 rng(4);
    evidex::VectorIndex index;
    for (int i = 0; i < 5000; ++i) index.insert_vector({{std::to_string(i), 0}, random_unit(rng)});
    auto q = random_unit(rng);
    for (auto _ : state) benchmark::DoNotOptimize(index.knn_search(q, 10, static_cast<std::size_t>(state.range(0))));
}
BENCHMARK(BM_HnswSearch)->Arg(50)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);

void BM_ExactKnn(benchmark::State& state) {
    std::mt19937_64 rng(4);
    evidex::VectorIndex index;
    for (int i = 0; i < 5000; ++i) index.insert_vector({{std::to_string(i), 0}, random_unit(rng)});
    auto q = random_unit(rng);
    for (auto _ : state) benchmark::DoNotOptimize(index.exact_knn(q, 10));
}
BENCHMARK(BM_ExactKnn)->Unit(benchmark::kMicrosecond);

} // namespace
