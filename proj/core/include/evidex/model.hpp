#pragma once

#include "evidex/embedding_vector.hpp"
#include "evidex/schema.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace evidex {

/// Level-1 field payload: single string (keyword/text/date), integer, or a
/// multi-valued keyword list.
using FieldValue = std::variant<std::string, std::int64_t, std::vector<std::string>>;

struct CharSpan {
    std::size_t start = 0;
    std::size_t end = 0;

    bool operator==(const CharSpan&) const = default;
};

/// Level-2 atomic semantic unit.
struct Segment {
    int ordinal = 0;
    std::string text;
    EmbeddingVector vector = EmbeddingVector::basis(0);
    CharSpan span;
};

struct Document {
    std::string doc_id;
    std::map<std::string, FieldValue> fields;
    std::vector<Segment> segments;
    std::string source_uri;
    std::int64_t schema_version = 1;
};

/// Checks every populated field against the schema plus the segment
/// invariants (non-empty text, ordered ordinals, valid spans, unit vectors).
ValidationReport validate_document(const Document& doc, const IndexSchema& schema);

struct ScoredHit {
    std::string doc_id;
    std::optional<double> lexical_score;
    std::optional<double> semantic_score;
    std::optional<int> best_segment_ordinal;
    std::optional<double> fused_score;
};

nlohmann::json document_to_json(const Document& doc);
Document document_from_json(const nlohmann::json& j);

} // namespace evidex
