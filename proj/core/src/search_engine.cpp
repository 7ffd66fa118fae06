#include "evidex/search_engine.hpp"

#include "evidex/error.hpp"

#include "detail/io.hpp"

#include <algorithm>
#include <mutex>

namespace evidex {

std::vector<FusedResult> SearchResponse::page(int from, int size) const {
    if (from < 0 || size <= 0 || static_cast<std::size_t>(from) >= ranked.size()) return {};
    auto begin = ranked.begin() + from;
    auto end = ranked.begin() + std::min<std::size_t>(ranked.size(), static_cast<std::size_t>(from) + size);
    return {begin, end};
}

SearchEngine::SearchEngine(IndexSchema schema, std::shared_ptr<const Embedder> embedder, SynonymGraph synonyms,
                           Bm25Params bm25, HnswParams hnsw)
    : SearchEngine(std::make_unique<LexicalIndex>(std::move(schema), bm25), std::make_unique<VectorIndex>(hnsw),
                   std::move(embedder), std::move(synonyms)) {}

SearchEngine::SearchEngine(std::unique_ptr<LexicalIndex> lexical, std::unique_ptr<VectorIndex> vectors,
                           std::shared_ptr<const Embedder> embedder, SynonymGraph synonyms)
    : lexical_(std::move(lexical)), vectors_(std::move(vectors)), embedder_(std::move(embedder)),
      synonyms_(std::move(synonyms)) {
    if (!embedder_) throw Error(ErrorCode::InvalidArgument, "search engine requires an embedder");
}

bool SearchEngine::add_document(const Document& doc) {
    auto report = validate_document(doc, schema());
    if (!report.ok())
        throw Error(ErrorCode::SchemaMismatch, "document '" + doc.doc_id + "' does not match schema: " + report.summary(),
                    {{"doc_id", doc.doc_id}});

    std::vector<VectorEntry> entries;
    entries.reserve(doc.segments.size());
    for (const auto& seg : doc.segments) entries.push_back({{doc.doc_id, seg.ordinal}, seg.vector});

    Document stored = doc;
    stored.schema_version = schema().version;

    std::unique_lock lock(mutex_);
    if (documents_.contains(doc.doc_id)) return false;
    for (const auto& e : entries)
        if (vectors_->contains(e.key))
            throw Error(ErrorCode::DuplicateSegment, "segment already indexed",
                        {{"doc_id", e.key.doc_id}, {"ordinal", e.key.ordinal}});
    lexical_->index_document(stored);
    vectors_->insert_batch(entries);
    documents_.emplace(doc.doc_id, std::move(stored));
    return true;
}

bool SearchEngine::contains(const std::string& doc_id) const {
    std::shared_lock lock(mutex_);
    return documents_.contains(doc_id);
}

std::optional<Document> SearchEngine::document(const std::string& doc_id) const {
    std::shared_lock lock(mutex_);
    auto it = documents_.find(doc_id);
    if (it == documents_.end()) return std::nullopt;
    return it->second;
}

std::vector<std::string> SearchEngine::doc_ids() const {
    std::shared_lock lock(mutex_);
    std::vector<std::string> ids;
    ids.reserve(documents_.size());
    for (const auto& [id, doc] : documents_) ids.push_back(id);
    return ids;
}

std::size_t SearchEngine::doc_count() const {
    std::shared_lock lock(mutex_);
    return documents_.size();
}

std::size_t SearchEngine::segment_count() const {
    std::shared_lock lock(mutex_);
    return vectors_->size();
}

ExecutionResult SearchEngine::execute(const dsl::Request& request) const {
    std::shared_lock lock(mutex_);
    return execute_query(request, ExecutionContext{*lexical_, *vectors_, synonyms_, *embedder_});
}

SearchResponse SearchEngine::search(const dsl::Request& request, const FusionConfig& fallback) const {
    SearchResponse response;
    response.fusion = request.fusion.value_or(fallback);
    validate_fusion(response.fusion);
    response.execution = execute(request);
    response.ranked = fuse(response.execution.hits, response.fusion);
    return response;
}

nlohmann::json SearchEngine::manifest() const {
    std::shared_lock lock(mutex_);
    return {{"format_version", kFormatVersion},
            {"embedder", embedder_->descriptor()},
            {"documents", documents_.size()},
            {"segments", vectors_->size()},
            {"lexical", lexical_->manifest()},
            {"vectors", vectors_->manifest()}};
}

void SearchEngine::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    std::shared_lock lock(mutex_);
    lexical_->save(dir / "lexical");
    vectors_->save(dir / "vectors");
    std::string docs;
    for (const auto& [id, doc] : documents_) {
        docs += document_to_json(doc).dump();
        docs += '\n';
    }
    detail::write_file_atomic(dir / "documents.jsonl", docs);
    lock.unlock();
    detail::write_file_atomic(dir / "manifest.json", manifest().dump(2) + "\n");
}

std::unique_ptr<SearchEngine> SearchEngine::load(const std::filesystem::path& dir,
                                                 std::shared_ptr<const Embedder> embedder, SynonymGraph synonyms) {
    if (!embedder) throw Error(ErrorCode::InvalidArgument, "search engine requires an embedder");
    nlohmann::json manifest;
    try {
        manifest = nlohmann::json::parse(detail::read_file(dir / "manifest.json"));
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::FormatMismatch, "unreadable index manifest", {{"path", dir.string()}, {"reason", e.what()}});
    }
    if (manifest.value("format_version", 0) != kFormatVersion)
        throw Error(ErrorCode::FormatMismatch, "unsupported index format", {{"path", dir.string()}});
    auto stored = manifest.value("embedder", std::string{});
    if (stored != embedder->descriptor())
        throw Error(ErrorCode::FormatMismatch, "index was built with a different embedder",
                    {{"index_embedder", stored}, {"embedder", embedder->descriptor()}});

    auto engine = std::unique_ptr<SearchEngine>(new SearchEngine(LexicalIndex::load(dir / "lexical"),
                                                                 VectorIndex::load(dir / "vectors"),
                                                                 std::move(embedder), std::move(synonyms)));
    detail::for_each_line(dir / "documents.jsonl", [&](const std::string& line) {
        if (line.empty()) return;
        auto doc = document_from_json(nlohmann::json::parse(line));
        for (auto& seg : doc.segments) {
            if (auto v = engine->vectors_->vector_of({doc.doc_id, seg.ordinal})) seg.vector = *v;
        }
        engine->documents_.emplace(doc.doc_id, std::move(doc));
    });
    if (engine->documents_.size() != engine->lexical_->doc_count())
        throw Error(ErrorCode::FormatMismatch, "document store and lexical index disagree",
                    {{"documents", engine->documents_.size()}, {"lexical", engine->lexical_->doc_count()}});
    return engine;
}

} // namespace evidex
