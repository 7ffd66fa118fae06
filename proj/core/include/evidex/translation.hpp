#pragma once

#include "evidex/query_dsl.hpp"
#include "evidex/schema.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <memory>
#include <optional>
#include <semaphore>
#include <string>
#include <string_view>
#include <vector>

namespace evidex {

enum class TranslatorKind { Remote, RuleBased, Manual };

std::string_view to_string(TranslatorKind kind) noexcept;
std::optional<TranslatorKind> translator_kind_from_string(std::string_view name) noexcept;

struct TranslationRequest {
    std::string nl_query;
    IndexSchema schema;
    std::string case_id;
};

/// One Auditor rewrite. `json_path` addresses the replaced subtree
/// ("$.query..." in the request document, evaluated after all earlier
/// corrections); `before`/`after` are that whole subtree.
struct Correction {
    std::string rule_id;
    std::string json_path;
    nlohmann::json before;
    nlohmann::json after;
    std::string message;

    bool operator==(const Correction&) const = default;
};

nlohmann::json correction_to_json(const Correction& c);
Correction correction_from_json(const nlohmann::json& j);

struct TranslationResult {
    dsl::Query query = dsl::Bool{};
    std::string reasoning;
    std::vector<Correction> corrections;
    TranslatorKind kind = TranslatorKind::RuleBased;
};

/// Fills the versioned Query Architect template with the schema JSON, the
/// segment field paths, the DSL grammar and the question. Uses nothing but
/// the schema and the question, so no indexed text can reach the prompt.
/// `retry_note` is appended verbatim after a failed parse.
std::string build_schema_prompt(const TranslationRequest& request, std::string_view retry_note = {});

/// Deterministic mini-grammar:
///   "quoted phrase"       match on body
///   from:<addr>           term on sender
///   to:<addr>             term on recipients
///   before:/after:<date>  one range on sent_date (lte / gte)
///   bare address, or two adjacent Capitalized words   term on people
///   remaining words       bool.should of match on body and nested knn
/// All pieces go under one bool.must in order of appearance, the hybrid
/// clause last. Throws EmptyIntent when nothing actionable remains.
TranslationResult translate_rule_based(const TranslationRequest& request);

/// Splits a model reply into the text before the last fenced block and the
/// block's contents. Returns nothing when the reply has no fenced block.
std::optional<std::pair<std::string, std::string>> extract_last_fenced_block(std::string_view reply);

class Translator {
public:
    virtual ~Translator() = default;
    virtual TranslatorKind kind() const noexcept = 0;
    /// Pre-audit translation.
    virtual TranslationResult translate(const TranslationRequest& request) const = 0;
};

class RuleBasedTranslator final : public Translator {
public:
    TranslatorKind kind() const noexcept override { return TranslatorKind::RuleBased; }
    TranslationResult translate(const TranslationRequest& request) const override {
        return translate_rule_based(request);
    }
};

struct RemoteTranslatorOptions {
    std::string url;  // POST {"prompt","max_tokens","temperature"} → {"text"}
    std::chrono::milliseconds timeout{60'000};
    int max_tokens = 1024;
    double temperature = 0.0;
    int max_inflight = 2;
};

/// Sends the schema prompt, parses the last fenced JSON block of the reply
/// (a request or a bare query node) and keeps the text before it as the
/// reasoning. A reply that does not parse is retried once with the parse
/// error appended; a second failure raises UntranslatableResponse carrying
/// the raw reply. Network failures raise TranslatorUnavailable.
class RemoteTranslator final : public Translator {
public:
    explicit RemoteTranslator(RemoteTranslatorOptions options);

    TranslatorKind kind() const noexcept override { return TranslatorKind::Remote; }
    TranslationResult translate(const TranslationRequest& request) const override;

    const RemoteTranslatorOptions& options() const noexcept { return options_; }

private:
    std::string complete(const std::string& prompt) const;

    RemoteTranslatorOptions options_;
    mutable std::counting_semaphore<64> inflight_;
};

} // namespace evidex
