#pragma once

#include "evidex/embedding.hpp"
#include "evidex/lexical_index.hpp"
#include "evidex/query_dsl.hpp"
#include "evidex/text_analysis.hpp"
#include "evidex/vector_index.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <vector>

namespace evidex {

/// Read-only view of one index snapshot plus the query-time analyzers.
struct ExecutionContext {
    const LexicalIndex& lexical;
    const VectorIndex& vectors;
    const SynonymGraph& synonyms;
    const Embedder& embedder;
};

struct ClauseTrace {
    std::string json_path;
    std::string clause;
    std::size_t hits = 0;
};

struct ScoreRange {
    std::size_t count = 0;
    double min = 0.0;
    double max = 0.0;
};

/// Transparency payload shown next to the results.
struct ExecutionTrace {
    std::string dsl;  // canonical serialization of the executed request
    ValidationReport validation;
    std::vector<ClauseTrace> clauses;
    ScoreRange lexical;
    ScoreRange semantic;
    double latency_ms = 0.0;

    nlohmann::json to_json() const;
};

struct ExecutionResult {
    std::vector<ScoredHit> hits;  // every matching document, ordered by doc_id
    ExecutionTrace trace;
};

/// Evaluates a validated request.
///
/// Match expands each query term through the synonym graph and scores BM25;
/// term/range filter without scoring; knn embeds query_text and retrieves
/// the k nearest documents by their best segment. Every clause inside one
/// nested block must be satisfied by the same segment. Bool: filter and must
/// intersect, should unions (at least one required only when must and
/// filter are empty), must_not subtracts. Lexical scores add up, semantic
/// scores take the max. A hit with neither score is reported with
/// lexical_score = 0.
///
/// Throws ValidationFailed for requests that do not validate against the
/// index schema, and propagates EmbedderUnavailable.
ExecutionResult execute_query(const dsl::Request& request, const ExecutionContext& context);

} // namespace evidex
