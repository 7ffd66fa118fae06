#pragma once

#include "evidex/chunking.hpp"
#include "evidex/config.hpp"
#include "evidex/embedding.hpp"
#include "evidex/fusion.hpp"
#include "evidex/ingestion.hpp"
#include "evidex/search_engine.hpp"
#include "evidex/text_analysis.hpp"
#include "evidex/translation.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

namespace evidex {

struct Case {
    std::string case_id;
    std::string title;
    std::string created_at;
    std::int64_t schema_version = 0;
    std::string corpus_ref;
    std::string index_path;  // relative to the workspace root
    std::size_t document_count = 0;
};

enum class ReviewStatus { Unreviewed, Reviewed, Flagged };

std::string_view to_string(ReviewStatus status) noexcept;
std::optional<ReviewStatus> review_status_from_string(std::string_view name) noexcept;

struct ReviewRecord {
    std::string case_id;
    std::string doc_id;
    ReviewStatus status = ReviewStatus::Unreviewed;
    std::string reviewer;
    std::string updated_at;
    std::string note;
};

struct SessionResult {
    int rank = 0;
    std::string doc_id;
    double fused_score = 0.0;
    double norm_lexical = 0.0;
    double norm_semantic = 0.0;
    std::optional<double> lexical_score;
    std::optional<double> semantic_score;
    std::optional<int> best_segment_ordinal;
};

/// Immutable record of one executed query. `request` is exactly what ran.
struct QuerySession {
    std::string session_id;
    std::string case_id;
    std::optional<std::string> parent_session_id;
    std::string created_at;
    std::optional<std::string> nl_query;
    TranslatorKind translator_kind = TranslatorKind::Manual;
    std::string reasoning;
    std::optional<nlohmann::json> pre_audit_query;
    std::vector<Correction> corrections;
    nlohmann::json request;  // canonical executed request
    FusionConfig fusion;
    std::size_t snapshot_documents = 0;
    std::size_t snapshot_segments = 0;
    std::vector<SessionResult> results;  // full fused ranking
    nlohmann::json trace;
};

nlohmann::json case_to_json(const Case& c);
nlohmann::json review_to_json(const ReviewRecord& r);
nlohmann::json session_to_json(const QuerySession& s);
QuerySession session_from_json(const nlohmann::json& j);

struct SessionCoverage {
    std::string session_id;
    std::size_t retrieved = 0;
    std::size_t reviewed = 0;
    std::size_t flagged = 0;
};

struct CoverageReport {
    std::string case_id;
    std::size_t total_docs = 0;
    std::size_t reviewed = 0;
    std::size_t flagged = 0;
    std::vector<SessionCoverage> sessions;
};

nlohmann::json coverage_to_json(const CoverageReport& r);

struct WorkspaceOptions {
    EmbedderConfig embedder;
    TranslatorConfig translator;
    SynonymGraph synonyms;
    ChunkProfile chunk_profile;
    FusionConfig fusion;
    int ingest_workers = 1;
};

/// Case-management state under one data directory:
///   cases.jsonl, sessions.jsonl, reviews.jsonl   append-only journals
///   indexes/<case_id>/                           saved SearchEngine
/// Opening a workspace replays the journals. Journal appends are flushed
/// before a call returns and are serialized by one writer lock; reads see
/// a consistent in-memory snapshot.
class Workspace {
public:
    explicit Workspace(std::filesystem::path root, WorkspaceOptions options = {});

    const std::filesystem::path& root() const noexcept { return root_; }
    const WorkspaceOptions& options() const noexcept { return options_; }

    /// Ingests `corpus_dir` into a new case with a fresh id. NotFound when
    /// the directory is missing.
    Case create_case(const std::string& title, const std::string& corpus_dir);
    /// Ingests into `case_id`, creating the case when needed. Re-ingesting
    /// already indexed messages is a no-op.
    std::pair<Case, IngestReport> ingest_case(const std::string& case_id, const std::string& corpus_dir,
                                              const ChunkProfile& profile, int workers);
    Case rename_case(const std::string& case_id, const std::string& title);

    std::optional<Case> find_case(const std::string& case_id) const;
    /// Throws NotFound.
    Case get_case(const std::string& case_id) const;
    std::vector<Case> cases() const;

    /// translate → audit → execute → fuse → persist. EmptyIntent, AuditReject
    /// and UntranslatableResponse propagate with the translation's reasoning
    /// and corrections attached to the details.
    QuerySession submit_nl_query(const std::string& case_id, const std::string& nl_query,
                                 const std::optional<FusionConfig>& fusion, std::optional<TranslatorKind> translator,
                                 const std::optional<std::string>& parent_session_id = std::nullopt);
    /// Parses and validates a hand-written request; recorded as manual.
    QuerySession submit_dsl_query(const std::string& case_id, const nlohmann::json& dsl,
                                  const std::optional<FusionConfig>& fusion,
                                  const std::optional<std::string>& parent_session_id = std::nullopt);

    std::optional<QuerySession> session(const std::string& case_id, const std::string& session_id) const;
    std::vector<QuerySession> sessions(const std::string& case_id) const;
    /// Re-executes a stored session's request against the current index.
    std::vector<std::string> replay_session(const std::string& case_id, const std::string& session_id) const;

    /// Throws NotFound for unknown documents.
    ReviewRecord set_review(const std::string& case_id, const std::string& doc_id, ReviewStatus status,
                            const std::string& note = {}, const std::string& reviewer = {});
    ReviewRecord review(const std::string& case_id, const std::string& doc_id) const;
    std::vector<ReviewRecord> reviews(const std::string& case_id) const;

    CoverageReport coverage(const std::string& case_id) const;

    std::optional<Document> document(const std::string& case_id, const std::string& doc_id) const;
    /// Loads the case index on first use. Throws NotFound.
    std::shared_ptr<const SearchEngine> engine(const std::string& case_id) const;

    const Translator& translator(TranslatorKind kind) const;

private:
    QuerySession run_session(const std::string& case_id, QuerySession session, const dsl::Request& request,
                             const std::optional<FusionConfig>& fusion);
    void replay_journals();
    void append(std::ofstream& out, const std::filesystem::path& path, const nlohmann::json& entry);
    std::string next_id(const char* prefix, std::size_t n) const;
    std::shared_ptr<SearchEngine> load_or_create_engine(const Case& c) const;

    std::filesystem::path root_;
    WorkspaceOptions options_;
    std::shared_ptr<const Embedder> embedder_;
    std::unique_ptr<Translator> rule_based_;
    std::unique_ptr<Translator> remote_;

    mutable std::shared_mutex state_mutex_;
    std::mutex writer_mutex_;
    std::mutex ingest_mutex_;
    std::ofstream cases_out_;
    std::ofstream sessions_out_;
    std::ofstream reviews_out_;

    std::map<std::string, Case> cases_;
    std::vector<std::string> case_order_;
    std::map<std::string, std::vector<QuerySession>> sessions_;
    std::map<std::string, std::map<std::string, ReviewRecord>> reviews_;
    std::size_t session_seq_ = 0;
    mutable std::mutex engines_mutex_;
    mutable std::map<std::string, std::shared_ptr<SearchEngine>> engines_;
};

} // namespace evidex
