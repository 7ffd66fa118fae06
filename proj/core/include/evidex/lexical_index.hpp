#pragma once

#include "evidex/model.hpp"
#include "evidex/schema.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <map>
#include <optional>
#include <set>
#include <shared_mutex>
#include <string>
#include <unordered_map>
#include <vector>

namespace evidex {

struct Bm25Params {
    double k1 = 1.2;
    double b = 0.75;
};

/// Okapi idf with the non-negative log(1 + ·) form.
double bm25_idf(std::uint64_t doc_count, std::uint64_t doc_freq) noexcept;
/// Full per-term contribution for one field of one unit.
double bm25_weight(double idf, std::uint32_t tf, std::uint32_t field_len, double avg_len, const Bm25Params& p) noexcept;

struct Posting {
    std::uint32_t unit = 0;
    std::vector<std::uint32_t> positions;

    std::uint32_t tf() const noexcept { return static_cast<std::uint32_t>(positions.size()); }
};

struct FieldStats {
    std::uint64_t doc_count = 0;
    std::uint64_t total_tokens = 0;
    double avg_field_length() const noexcept {
        return doc_count == 0 ? 0.0 : static_cast<double>(total_tokens) / static_cast<double>(doc_count);
    }
};

/// One clause term: the query term plus its synonym expansion.
struct QueryTerm {
    std::string field;
    std::set<std::string> alternatives;
};

/// Segment addressed by internal document number and ordinal.
struct SegmentRef {
    std::uint32_t doc = 0;
    int ordinal = 0;

    auto operator<=>(const SegmentRef&) const = default;
};

/// Level-1 inverted index with BM25 over the schema's text fields, plus a
/// per-segment posting space for `<nested>.segment_text` so nested match
/// clauses can be evaluated segment by segment.
///
/// Append-only. Writers build a document's postings outside the lock and
/// publish them under an exclusive lock, so readers never observe a
/// partially indexed document.
class LexicalIndex {
public:
    static constexpr int kFormatVersion = 1;

    explicit LexicalIndex(IndexSchema schema, Bm25Params params = {});

    LexicalIndex(const LexicalIndex&) = delete;
    LexicalIndex& operator=(const LexicalIndex&) = delete;

    const IndexSchema& schema() const noexcept { return schema_; }
    const Bm25Params& params() const noexcept { return params_; }

    /// Throws DuplicateDocument or SchemaMismatch.
    void index_document(const Document& doc);

    std::size_t doc_count() const;
    std::size_t segment_count() const;
    bool contains(const std::string& doc_id) const;
    std::optional<std::uint32_t> doc_number(const std::string& doc_id) const;
    std::string doc_id(std::uint32_t doc_no) const;
    /// Stored Level-1 values (keyword/date/integer/text) of a document.
    std::map<std::string, FieldValue> stored_fields(std::uint32_t doc_no) const;
    std::vector<SegmentRef> segments_of(std::uint32_t doc_no) const;
    /// Documents whose stored `field` value satisfies `pred`, ascending.
    std::vector<std::uint32_t> docs_where(const std::string& field,
                                          const std::function<bool(const FieldValue&)>& pred) const;
    std::vector<SegmentRef> all_segments() const;

    FieldStats stats(const std::string& field) const;
    std::uint64_t document_frequency(const std::string& term, const std::string& field) const;
    std::uint32_t term_frequency(const std::string& term, const std::string& field, const std::string& doc_id) const;

    /// Throws UnknownField for non-text fields.
    double bm25_term_score(const std::string& term, const std::string& field, const std::string& doc_id) const;

    /// Σ over query terms of max over alternatives of BM25; top-k by score
    /// desc, then doc_id asc.
    std::vector<ScoredHit> search_lexical(const std::vector<QueryTerm>& terms, int k) const;

    /// Unranked scoring of a match clause on a document-level text field.
    std::unordered_map<std::uint32_t, double> score_field(const std::string& field,
                                                         const std::vector<std::set<std::string>>& terms) const;
    /// Same over individual segments of the nested field.
    std::map<SegmentRef, double> score_segments(const std::vector<std::set<std::string>>& terms) const;

    /// Deterministic size of all posting data; independent of insertion order.
    std::uint64_t posting_bytes() const;

    /// Writes manifest.json, postings.jsonl and documents.jsonl under `dir`.
    void save(const std::filesystem::path& dir) const;
    /// Throws FormatMismatch when the on-disk format version differs.
    static std::unique_ptr<LexicalIndex> load(const std::filesystem::path& dir);
    nlohmann::json manifest() const;

private:
    struct FieldPostings {
        std::unordered_map<std::string, std::vector<Posting>> postings;
        std::vector<std::uint32_t> lengths;  // by unit
        FieldStats stats;
    };

    using TextFieldMap = std::map<std::string, FieldPostings>;

    bool is_text_field(const std::string& field) const;
    const FieldPostings* field_postings(const std::string& field) const;
    template <typename Fn>
    void score_terms(const FieldPostings& fp, const std::vector<std::set<std::string>>& terms, Fn&& emit) const;
    static void add_text(FieldPostings& fp, std::uint32_t unit, std::string_view text);

    IndexSchema schema_;
    Bm25Params params_;
    std::string segment_field_;

    mutable std::shared_mutex mutex_;
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::uint32_t> numbers_;
    std::vector<std::map<std::string, FieldValue>> stored_;
    std::vector<std::vector<std::uint32_t>> doc_segments_;  // doc -> segment units
    std::vector<SegmentRef> segment_units_;
    TextFieldMap fields_;
};

} // namespace evidex
