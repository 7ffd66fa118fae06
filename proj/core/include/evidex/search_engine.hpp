#pragma once

#include "evidex/embedding.hpp"
#include "evidex/executor.hpp"
#include "evidex/fusion.hpp"
#include "evidex/lexical_index.hpp"
#include "evidex/model.hpp"
#include "evidex/query_dsl.hpp"
#include "evidex/text_analysis.hpp"
#include "evidex/vector_index.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace evidex {

struct SearchResponse {
    ExecutionResult execution;
    FusionConfig fusion;
    std::vector<FusedResult> ranked;  // full fused ranking, rank 1 first

    /// ranked[from, from + size)
    std::vector<FusedResult> page(int from, int size) const;
};

/// Both index levels plus the document store behind one commit path.
///
/// add_document validates everything up front and then publishes the
/// Level-1 entry, the segment vectors and the stored document under a single
/// exclusive lock; searches hold a shared lock for their whole execution and
/// therefore see either all or none of a document.
class SearchEngine {
public:
    static constexpr int kFormatVersion = 1;

    SearchEngine(IndexSchema schema, std::shared_ptr<const Embedder> embedder, SynonymGraph synonyms = {},
                 Bm25Params bm25 = {}, HnswParams hnsw = {});
    SearchEngine(const SearchEngine&) = delete;
    SearchEngine& operator=(const SearchEngine&) = delete;

    const IndexSchema& schema() const noexcept { return lexical_->schema(); }
    const Embedder& embedder() const noexcept { return *embedder_; }
    const SynonymGraph& synonyms() const noexcept { return synonyms_; }

    /// False when the document id is already indexed (idempotent re-delivery).
    /// Throws SchemaMismatch, InvalidVector or DuplicateSegment.
    bool add_document(const Document& doc);

    bool contains(const std::string& doc_id) const;
    std::optional<Document> document(const std::string& doc_id) const;
    std::vector<std::string> doc_ids() const;
    std::size_t doc_count() const;
    std::size_t segment_count() const;

    ExecutionResult execute(const dsl::Request& request) const;
    /// Executes and fuses; the request's own fusion block wins over `fallback`.
    SearchResponse search(const dsl::Request& request, const FusionConfig& fallback = {}) const;

    /// Order-independent summary: identical for identical document sets.
    nlohmann::json manifest() const;

    /// Writes manifest.json, documents.jsonl, lexical/ and vectors/ under `dir`.
    void save(const std::filesystem::path& dir) const;
    /// Throws FormatMismatch when the stored embedder descriptor differs from
    /// `embedder`'s (indexes never mix embedders) or the format is unknown.
    static std::unique_ptr<SearchEngine> load(const std::filesystem::path& dir,
                                              std::shared_ptr<const Embedder> embedder, SynonymGraph synonyms = {});

    const LexicalIndex& lexical() const noexcept { return *lexical_; }
    const VectorIndex& vectors() const noexcept { return *vectors_; }

private:
    SearchEngine(std::unique_ptr<LexicalIndex> lexical, std::unique_ptr<VectorIndex> vectors,
                 std::shared_ptr<const Embedder> embedder, SynonymGraph synonyms);

    std::unique_ptr<LexicalIndex> lexical_;
    std::unique_ptr<VectorIndex> vectors_;
    std::shared_ptr<const Embedder> embedder_;
    SynonymGraph synonyms_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, Document> documents_;
};

} // namespace evidex
