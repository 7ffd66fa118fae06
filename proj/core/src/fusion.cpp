#include "evidex/fusion.hpp"

#include "evidex/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace evidex {

std::string_view to_string(FusionMode mode) noexcept {
    switch (mode) {
    case FusionMode::LexicalOnly: return "lexical_only";
    case FusionMode::SemanticOnly: return "semantic_only";
    case FusionMode::Hybrid: return "hybrid";
    }
    return "hybrid";
}

std::optional<FusionMode> fusion_mode_from_string(std::string_view name) noexcept {
    if (name == "lexical_only") return FusionMode::LexicalOnly;
    if (name == "semantic_only") return FusionMode::SemanticOnly;
    if (name == "hybrid") return FusionMode::Hybrid;
    return std::nullopt;
}

void validate_fusion(const FusionConfig& config) {
    auto bad = [](const std::string& why) { throw Error(ErrorCode::InvalidFusionConfig, why); };
    if (!std::isfinite(config.w_lex) || !std::isfinite(config.w_sem)) bad("fusion weights must be finite");
    if (config.w_lex < 0.0 || config.w_sem < 0.0) bad("fusion weights must be >= 0");
    if (config.mode == FusionMode::Hybrid && !(config.w_lex + config.w_sem > 0.0)) {
        bad("hybrid fusion requires w_lex + w_sem > 0");
    }
    if (config.candidate_pool <= 0) bad("candidate_pool must be positive");
}

nlohmann::json fusion_to_json(const FusionConfig& config) {
    return {{"mode", std::string(to_string(config.mode))},
            {"w_lex", config.w_lex},
            {"w_sem", config.w_sem},
            {"candidate_pool", config.candidate_pool}};
}

FusionConfig fusion_from_json(const nlohmann::json& j, const std::string& json_path) {
    auto fail = [&](const std::string& path, const std::string& reason) {
        throw Error(ErrorCode::ParseError, path + ": " + reason, {{"json_path", path}, {"reason", reason}});
    };
    if (!j.is_object()) fail(json_path, "expected an object");
    FusionConfig config;
    for (const auto& [key, value] : j.items()) {
        const auto path = json_path + "." + key;
        if (key == "mode") {
            auto mode = value.is_string() ? fusion_mode_from_string(value.get<std::string>()) : std::nullopt;
            if (!mode) fail(path, "expected one of lexical_only, semantic_only, hybrid");
            config.mode = *mode;
        } else if (key == "w_lex" || key == "w_sem") {
            if (!value.is_number()) fail(path, "expected a number");
            (key == "w_lex" ? config.w_lex : config.w_sem) = value.get<double>();
        } else if (key == "candidate_pool") {
            if (!value.is_number_integer()) fail(path, "expected an integer");
            config.candidate_pool = value.get<int>();
        } else {
            fail(path, "unknown option");
        }
    }
    return config;
}

std::vector<double> normalize_minmax(std::span<const double> scores) {
    if (scores.empty()) return {};
    auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
    const double min = *lo;
    const double max = *hi;
    std::vector<double> out(scores.size());
    if (max == min) {
        std::fill(out.begin(), out.end(), max > 0.0 ? 1.0 : 0.0);
        return out;
    }
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = std::clamp((scores[i] - min) / (max - min), 0.0, 1.0);
    return out;
}

ModeHits split_by_mode(std::span<const ScoredHit> hits) {
    ModeHits out;
    for (const auto& h : hits) {
        if (h.lexical_score) out.lexical.push_back(h);
        if (h.semantic_score) out.semantic.push_back(h);
    }
    return out;
}

namespace {

using ScoreOf = std::optional<double> ScoredHit::*;

/// Pool-truncated (doc_id → normalized score) map for one mode.
std::map<std::string, std::pair<double, const ScoredHit*>> normalized_pool(std::span<const ScoredHit> hits, ScoreOf score,
                                                                           int pool) {
    std::vector<const ScoredHit*> ordered;
    for (const auto& h : hits) {
        if ((h.*score).has_value()) ordered.push_back(&h);
    }
    std::sort(ordered.begin(), ordered.end(), [&](const ScoredHit* a, const ScoredHit* b) {
        if (*(a->*score) != *(b->*score)) return *(a->*score) > *(b->*score);
        return a->doc_id < b->doc_id;
    });
    if (ordered.size() > static_cast<std::size_t>(pool)) ordered.resize(static_cast<std::size_t>(pool));

    std::vector<double> raw;
    raw.reserve(ordered.size());
    for (const auto* h : ordered) raw.push_back(*(h->*score));
    auto norm = normalize_minmax(raw);

    std::map<std::string, std::pair<double, const ScoredHit*>> out;
    for (std::size_t i = 0; i < ordered.size(); ++i) out.emplace(ordered[i]->doc_id, std::make_pair(norm[i], ordered[i]));
    return out;
}

} // namespace

std::vector<FusedResult> fuse_hybrid(std::span<const ScoredHit> lexical_hits, std::span<const ScoredHit> semantic_hits,
                                     const FusionConfig& config) {
    validate_fusion(config);
    double w_lex = 0.0;
    double w_sem = 0.0;
    switch (config.mode) {
    case FusionMode::LexicalOnly: w_lex = 1.0; break;
    case FusionMode::SemanticOnly: w_sem = 1.0; break;
    case FusionMode::Hybrid:
        w_lex = config.w_lex / (config.w_lex + config.w_sem);
        w_sem = config.w_sem / (config.w_lex + config.w_sem);
        break;
    }

    std::map<std::string, FusedResult> merged;
    if (w_lex > 0.0) {
        for (const auto& [id, entry] : normalized_pool(lexical_hits, &ScoredHit::lexical_score, config.candidate_pool)) {
            auto& r = merged[id];
            r.doc_id = id;
            r.norm_lexical = entry.first;
            r.lexical_score = entry.second->lexical_score;
        }
    }
    if (w_sem > 0.0) {
        for (const auto& [id, entry] : normalized_pool(semantic_hits, &ScoredHit::semantic_score, config.candidate_pool)) {
            auto& r = merged[id];
            r.doc_id = id;
            r.norm_semantic = entry.first;
            r.semantic_score = entry.second->semantic_score;
            r.best_segment_ordinal = entry.second->best_segment_ordinal;
        }
    }

    std::vector<FusedResult> out;
    out.reserve(merged.size());
    for (auto& [id, r] : merged) {
        r.fused_score = std::clamp(w_lex * r.norm_lexical + w_sem * r.norm_semantic, 0.0, 1.0);
        out.push_back(std::move(r));
    }
    std::sort(out.begin(), out.end(), [](const FusedResult& a, const FusedResult& b) {
        if (a.fused_score != b.fused_score) return a.fused_score > b.fused_score;
        return a.doc_id < b.doc_id;
    });
    for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = static_cast<int>(i) + 1;
    return out;
}

} // namespace evidex
