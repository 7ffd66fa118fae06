#include "evidex/embedding.hpp"

#include <benchmark/benchmark.h>

#include <string>

namespace {

void BM_HashingEmbed(benchmark::State& state) {
    std::string text;
    for (int i = 0; i < state.range(0); ++i) text += "raptor hedge capacity " + std::to_string(i) + ' ';
    evidex::HashingEmbedder embedder;
    for (auto _ : state) benchmark::DoNotOptimize(embedder.embed(text));
    state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(text.size()));
}
BENCHMARK(BM_HashingEmbed)->Arg(10)->Arg(100)->Arg(1000);

} // namespace
