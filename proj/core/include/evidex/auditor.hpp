#pragma once

#include "evidex/query_dsl.hpp"
#include "evidex/schema.hpp"
#include "evidex/translation.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace evidex {

struct AuditRuleInfo {
    std::string rule_id;
    std::string description;
    bool rewrites = false;  // false: the rule rejects
};

/// R1..R5 in application order.
const std::vector<AuditRuleInfo>& audit_rules();

struct AuditResult {
    dsl::Query query = dsl::Bool{};
    std::vector<Correction> corrections;
};

/// Single fixed-order pass over a parsed query:
///   R1 unknown field or nested path          reject
///   R2 clause/field type mismatch            reject
///   R3 address or Capitalized name bigram in knn query_text
///        → removed (with a leading preposition) and added as term on
///          people, or on sender for an address introduced by "from"
///   R4 YYYY-MM-DD date in knn query_text     → same-day range on sent_date
///   R5 segment field outside nested          → wrapped in nested
/// R3/R4 attach the new term to the nearest bool that requires the knn
/// (via must or filter), or wrap the knn's nested block in a new bool.must.
/// The result is validated once more; anything still invalid is rejected.
/// Rejections raise AuditReject with `rule_id`, `json_path` and the
/// corrections applied so far in the details.
AuditResult audit_query(const dsl::Query& query, const IndexSchema& schema, std::string_view nl_query = {});

/// Applies corrections, in order, to `{"query": <query>}`.
dsl::Query replay_corrections(const dsl::Query& query, const std::vector<Correction>& corrections);

/// "$.query.bool.must[0]" → "/query/bool/must/0".
std::string json_path_to_pointer(std::string_view json_path);

} // namespace evidex
