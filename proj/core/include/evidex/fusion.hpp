#pragma once

#include "evidex/model.hpp"

#include <nlohmann/json.hpp>

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evidex {

enum class FusionMode { LexicalOnly, SemanticOnly, Hybrid };

std::string_view to_string(FusionMode mode) noexcept;
std::optional<FusionMode> fusion_mode_from_string(std::string_view name) noexcept;

struct FusionConfig {
    FusionMode mode = FusionMode::Hybrid;
    double w_lex = 0.5;
    double w_sem = 0.5;
    int candidate_pool = 1000;

    bool operator==(const FusionConfig&) const = default;
};

/// Throws InvalidFusionConfig: negative or non-finite weights, a hybrid
/// config whose weights sum to zero, or a non-positive candidate pool.
void validate_fusion(const FusionConfig& config);

nlohmann::json fusion_to_json(const FusionConfig& config);
/// Strict: unknown keys or wrong types raise ParseError at `json_path`.
FusionConfig fusion_from_json(const nlohmann::json& j, const std::string& json_path = "$.fusion");

struct FusedResult {
    std::string doc_id;
    double fused_score = 0.0;
    double norm_lexical = 0.0;
    double norm_semantic = 0.0;
    std::optional<double> lexical_score;
    std::optional<double> semantic_score;
    std::optional<int> best_segment_ordinal;
    int rank = 0;
};

/// x → (x − min)/(max − min); a constant list maps to 1.0 when the value is
/// positive, else 0.0.
std::vector<double> normalize_minmax(std::span<const double> scores);

/// Fuses per-mode hit lists from one query execution.
///
/// Each list is cut to the candidate pool by its own score. Pure modes rank
/// their single normalized score. Hybrid ranks w_lex·norm_lex + w_sem·norm_sem
/// (weights normalized to sum 1) over the union of documents retrieved by
/// the modes that carry positive weight; a mode a document was not
/// retrieved by contributes 0. Ties go to the lower doc_id.
std::vector<FusedResult> fuse_hybrid(std::span<const ScoredHit> lexical_hits, std::span<const ScoredHit> semantic_hits,
                                     const FusionConfig& config);

/// Splits executor hits into the lexical list (lexical_score present) and
/// the semantic list (semantic_score present).
struct ModeHits {
    std::vector<ScoredHit> lexical;
    std::vector<ScoredHit> semantic;
};
ModeHits split_by_mode(std::span<const ScoredHit> hits);

inline std::vector<FusedResult> fuse(std::span<const ScoredHit> hits, const FusionConfig& config) {
    auto modes = split_by_mode(hits);
    return fuse_hybrid(modes.lexical, modes.semantic, config);
}

} // namespace evidex
