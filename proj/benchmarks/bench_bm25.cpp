#include "evidex/lexical_index.hpp"

#include <benchmark/benchmark.h>

#include <random>
#include <string>

namespace {

evidex::Document random_doc(std::mt19937_64& rng, int id, int vocab) {
    std::uniform_int_distribution<int> len(50, 400), word(0, vocab - 1);
    std::string body;
    for (int i = len(rng); i > 0; --i) body += "w" + std::to_string(word(rng)) + ' ';
    evidex::Document d;
    d.doc_id = "d" + std::to_string(id);
    d.fields["message_id"] = d.doc_id;
    d.fields["body"] = body;
    return d;
}

void BM_IndexDocument(benchmark::State& state) {
    std::mt19937_64 rng(1);
    std::vector<evidex::Document> docs;
    for (int i = 0; i < 1000; ++i) docs.push_back(random_doc(rng, i, 5000));
    for (auto _ : state) {
        evidex::LexicalIndex index(evidex::default_enron_schema());
        for (const auto& d : docs) index.index_document(d);
        benchmark::DoNotOptimize(index.doc_count());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(docs.size()));
}
BENCHMARK(BM_IndexDocument)->Unit(benchmark::kMillisecond);

void BM_SearchLexical(benchmark::State& state) {
    std::mt19937_64 rng(2);
    evidex::LexicalIndex index(evidex::default_enron_schema());
    for (int i = 0; i < state.range(0); ++i) index.index_document(random_doc(rng, i, 5000));
    std::uniform_int_distribution<int> word(0, 999);
    for (auto _ : state) {
        std::vector<evidex::QueryTerm> terms;
        for (int t = 0; t < 3; ++t) terms.push_back({"body", {"w" + std::to_string(word(rng))}});
        benchmark::DoNotOptimize(index.search_lexical(terms, 100));
    }
}
BENCHMARK(BM_SearchLexical)->Arg(1000)->Arg(10000)->Unit(benchmark::kMicrosecond);

} // namespace
