#pragma once

#include "evidex/fusion.hpp"
#include "evidex/search_engine.hpp"
#include "evidex/translation.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace evidex {

struct Scenario {
    std::string scenario_id;
    std::string nl_query;
    std::set<std::string> relevant_doc_ids;
    std::string notes;
};

/// JSON list of {scenario_id, nl_query, relevant_doc_ids, notes?}. Throws
/// InvalidArgument("no scenarios") for an empty list and for scenarios with
/// an empty relevant set or a duplicate id.
std::vector<Scenario> parse_scenarios(const nlohmann::json& j);
std::vector<Scenario> load_scenarios(const std::filesystem::path& path);

/// User-supplied judgments: a topics file (JSON list of {scenario_id,
/// nl_query, notes?}) plus a qrels file of "scenario_id doc_id relevance"
/// lines; relevance > 0 marks a relevant document.
std::vector<Scenario> load_judgments(const std::filesystem::path& topics, const std::filesystem::path& qrels);

/// |top-k ∩ relevant| / |relevant|. Throws InvalidArgument on an empty
/// relevant set or k < 1.
double recall_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant, int k);
/// |top-k ∩ relevant| / min(k, |ranked|); 0 for an empty ranking.
double precision_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant, int k);

struct NamedFusion {
    std::string name;
    FusionConfig fusion;
};

struct AblationConfig {
    std::vector<NamedFusion> configs;
    std::vector<int> ks{10, 100};

    /// lexical_only, semantic_only and hybrid (0.5 / 0.5).
    static AblationConfig canonical();
};

/// {"configs":[{"name":..., "mode":..., "w_lex":..., "w_sem":..., "candidate_pool":...}],
///  "k":[10,100], "weight_sweep":[0,0.25,...]}. Each sweep value w adds a
/// hybrid config "hybrid_w<w>" with w_lex = w, w_sem = 1 − w. The configs
/// must cover all three modes.
AblationConfig parse_ablation_config(const nlohmann::json& j);
AblationConfig load_ablation_config(const std::filesystem::path& path);

struct ResultRow {
    std::string scenario_id;
    std::string config;
    FusionConfig fusion;
    int k = 0;
    double recall = 0.0;
    double precision = 0.0;
    std::size_t retrieved = 0;  // length of the fused ranking
    std::size_t relevant = 0;
};

struct AblationTable {
    std::vector<ResultRow> rows;  // by scenario_id, then config order, then k

    std::string to_csv() const;
    /// Aligned table with a per-config mean section.
    std::string to_text() const;
    /// Rows of one scenario/config/k, if present.
    const ResultRow* find(const std::string& scenario_id, const std::string& config, int k) const;
};

/// Translates each scenario (audited), executes it once and fuses the hits
/// under every config. Unknown relevant doc ids abort before anything runs
/// (NotFound). Translation or audit failures propagate.
AblationTable run_ablation(const SearchEngine& engine, const std::vector<Scenario>& scenarios,
                           const AblationConfig& config, const Translator& translator, int workers = 1);

/// Writes results.csv and results.txt into `dir`.
void write_results(const AblationTable& table, const std::filesystem::path& dir);

} // namespace evidex
