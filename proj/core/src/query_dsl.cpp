#include "evidex/query_dsl.hpp"

#include "detail/resources.hpp"
#include "evidex/error.hpp"

#include <regex>

namespace evidex::dsl {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
    throw Error(ErrorCode::ParseError, path + ": " + reason, {{"json_path", path}, {"reason", reason}});
}

const json& require_object(const json& j, const std::string& path) {
    if (!j.is_object()) fail(path, "expected an object");
    return j;
}

/// `{field: value}` with exactly one entry.
std::pair<std::string, const json*> single_field(const json& j, const std::string& path) {
    require_object(j, path);
    if (j.size() != 1) fail(path, "expected exactly one field");
    auto it = j.begin();
    return {it.key(), &it.value()};
}

Scalar parse_scalar(const json& j, const std::string& path) {
    if (j.is_string()) return j.get<std::string>();
    if (j.is_number_integer()) return j.get<std::int64_t>();
    fail(path, "expected a string or integer");
}

std::vector<Query> parse_clause_list(const json& j, const std::string& path) {
    std::vector<Query> out;
    if (j.is_array()) {
        for (std::size_t i = 0; i < j.size(); ++i) out.push_back(parse_query_node(j[i], path + "[" + std::to_string(i) + "]"));
    } else if (j.is_object()) {
        out.push_back(parse_query_node(j, path));
    } else {
        fail(path, "expected an array of queries");
    }
    return out;
}

Bool parse_bool(const json& j, const std::string& path) {
    require_object(j, path);
    Bool b;
    for (const auto& [key, value] : j.items()) {
        const auto sub = path + "." + key;
        if (key == "must") b.must = parse_clause_list(value, sub);
        else if (key == "should") b.should = parse_clause_list(value, sub);
        else if (key == "must_not") b.must_not = parse_clause_list(value, sub);
        else if (key == "filter") b.filter = parse_clause_list(value, sub);
        else fail(sub, "unknown option");
    }
    return b;
}

Match parse_match(const json& j, const std::string& path) {
    auto [field, value] = single_field(j, path);
    const auto sub = path + "." + field;
    if (value->is_string()) return {field, value->get<std::string>()};
    require_object(*value, sub);
    std::optional<std::string> text;
    for (const auto& [key, v] : value->items()) {
        if (key != "query") fail(sub + "." + key, "unknown option");
        if (!v.is_string()) fail(sub + ".query", "expected a string");
        text = v.get<std::string>();
    }
    if (!text) fail(sub, "missing 'query'");
    return {field, *text};
}

Term parse_term(const json& j, const std::string& path) {
    auto [field, value] = single_field(j, path);
    const auto sub = path + "." + field;
    if (!value->is_object()) return {field, parse_scalar(*value, sub)};
    std::optional<Scalar> scalar;
    for (const auto& [key, v] : value->items()) {
        if (key != "value") fail(sub + "." + key, "unknown option");
        scalar = parse_scalar(v, sub + ".value");
    }
    if (!scalar) fail(sub, "missing 'value'");
    return {field, *scalar};
}

Range parse_range(const json& j, const std::string& path) {
    auto [field, value] = single_field(j, path);
    const auto sub = path + "." + field;
    require_object(*value, sub);
    Range r{field, std::nullopt, std::nullopt};
    for (const auto& [key, v] : value->items()) {
        if (key == "gte") r.gte = parse_scalar(v, sub + ".gte");
        else if (key == "lte") r.lte = parse_scalar(v, sub + ".lte");
        else fail(sub + "." + key, "unknown option");
    }
    if (!r.gte && !r.lte) fail(sub, "range needs 'gte' and/or 'lte'");
    return r;
}

Nested parse_nested(const json& j, const std::string& path) {
    require_object(j, path);
    std::optional<std::string> nested_path;
    std::optional<Query> inner;
    for (const auto& [key, v] : j.items()) {
        if (key == "path") {
            if (!v.is_string()) fail(path + ".path", "expected a string");
            nested_path = v.get<std::string>();
        } else if (key == "query") {
            inner = parse_query_node(v, path + ".query");
        } else {
            fail(path + "." + key, "unknown option");
        }
    }
    if (!nested_path) fail(path, "missing 'path'");
    if (!inner) fail(path, "missing 'query'");
    return Nested{*nested_path, std::move(*inner)};
}

Knn parse_knn(const json& j, const std::string& path) {
    auto [field, value] = single_field(j, path);
    const auto sub = path + "." + field;
    require_object(*value, sub);
    Knn knn{field, "", 100};
    bool has_text = false;
    for (const auto& [key, v] : value->items()) {
        if (key == "query_text") {
            if (!v.is_string()) fail(sub + ".query_text", "expected a string");
            knn.query_text = v.get<std::string>();
            has_text = true;
        } else if (key == "k") {
            if (!v.is_number_integer()) fail(sub + ".k", "expected an integer");
            knn.k = v.get<int>();
        } else {
            fail(sub + "." + key, "unknown option");
        }
    }
    if (!has_text) fail(sub, "missing 'query_text'");
    return knn;
}

json scalar_json(const Scalar& s) {
    return std::visit([](const auto& v) { return json(v); }, s);
}

} // namespace

Query parse_query_node(const json& j, const std::string& path) {
    require_object(j, path);
    if (j.empty()) fail(path, "empty query object");
    if (j.size() != 1) fail(path, "a query object holds exactly one clause");
    auto it = j.begin();
    const auto& name = it.key();
    const auto sub = path + "." + name;
    if (name == "bool") return parse_bool(it.value(), sub);
    if (name == "match") return parse_match(it.value(), sub);
    if (name == "term") return parse_term(it.value(), sub);
    if (name == "range") return parse_range(it.value(), sub);
    if (name == "nested") return parse_nested(it.value(), sub);
    if (name == "knn") return parse_knn(it.value(), sub);
    fail(sub, "unsupported clause");
}

Request parse_request(const json& j) {
    require_object(j, "$");
    std::optional<Query> query;
    Request r;
    for (const auto& [key, v] : j.items()) {
        const auto path = "$." + key;
        if (key == "query") {
            query = parse_query_node(v, path);
        } else if (key == "size" || key == "from") {
            if (!v.is_number_integer() || v.get<std::int64_t>() < 0) fail(path, "expected a non-negative integer");
            if (v.get<std::int64_t>() > kMaxWindow) fail(path, "exceeds the 10000 result window");
            (key == "size" ? r.size : r.from) = v.get<int>();
        } else if (key == "fusion") {
            r.fusion = fusion_from_json(v, path);
        } else {
            fail(path, "unknown option");
        }
    }
    if (!query) fail("$", "missing 'query'");
    if (r.size + r.from > kMaxWindow) fail("$", "from + size exceeds the 10000 result window");
    r.query = std::move(*query);
    return r;
}

Request parse_request(std::string_view json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail("$", std::string("invalid JSON: ") + e.what());
    }
    return parse_request(j);
}

json to_json(const Query& q) {
    return std::visit(
        [](const auto& n) -> json {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Bool>) {
                json body = json::object();
                auto put = [&](const char* key, const std::vector<Query>& list) {
                    if (list.empty()) return;
                    json arr = json::array();
                    for (const auto& c : list) arr.push_back(to_json(c));
                    body[key] = std::move(arr);
                };
                put("must", n.must);
                put("should", n.should);
                put("must_not", n.must_not);
                put("filter", n.filter);
                return {{"bool", body}};
            } else if constexpr (std::is_same_v<T, Match>) {
                return {{"match", {{n.field, n.text}}}};
            } else if constexpr (std::is_same_v<T, Term>) {
                return {{"term", {{n.field, scalar_json(n.value)}}}};
            } else if constexpr (std::is_same_v<T, Range>) {
                json bounds = json::object();
                if (n.gte) bounds["gte"] = scalar_json(*n.gte);
                if (n.lte) bounds["lte"] = scalar_json(*n.lte);
                return {{"range", {{n.field, bounds}}}};
            } else if constexpr (std::is_same_v<T, Nested>) {
                return {{"nested", {{"path", n.path}, {"query", to_json(*n.query)}}}};
            } else {
                return {{"knn", {{n.field, {{"query_text", n.query_text}, {"k", n.k}}}}}};
            }
        },
        q.node);
}

json to_json(const Request& r) {
    json j = {{"query", to_json(r.query)}, {"size", r.size}, {"from", r.from}};
    if (r.fusion) j["fusion"] = fusion_to_json(*r.fusion);
    return j;
}

std::string serialize(const Request& r) { return to_json(r).dump(); }
std::string serialize(const Query& q) { return to_json(q).dump(); }

bool is_date_literal(std::string_view s) noexcept {
    static const std::regex re(R"((\d{4})-(\d{2})-(\d{2})(T(\d{2}):(\d{2}):(\d{2})Z)?)");
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_match(s.begin(), s.end(), m, re)) return false;
    auto num = [&](int i) { return std::stoi(m[i].str()); };
    if (num(2) < 1 || num(2) > 12 || num(3) < 1 || num(3) > 31) return false;
    if (m[4].matched && (num(5) > 23 || num(6) > 59 || num(7) > 60)) return false;
    return true;
}

namespace {

void validate_node(const Query& q, const IndexSchema& schema, const std::string& path, bool in_nested,
                   ValidationReport& report) {
    auto check_field = [&](const std::string& field, const std::string& fpath) -> std::optional<FieldRole> {
        auto role = schema.resolve(field);
        if (!role) {
            report.add(fpath, "unknown field '" + field + "'");
            return std::nullopt;
        }
        const bool segment_role = *role == FieldRole::SegmentText || *role == FieldRole::SegmentVector;
        if (in_nested && !segment_role) {
            report.add(fpath, "field '" + field + "' is not a segment field and cannot appear inside nested");
        }
        if (!in_nested && *role == FieldRole::SegmentText) {
            report.add(fpath, "segment field '" + field + "' outside nested");
        }
        return role;
    };

    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Bool>) {
                auto walk = [&](const char* key, const std::vector<Query>& list) {
                    for (std::size_t i = 0; i < list.size(); ++i) {
                        validate_node(list[i], schema, path + ".bool." + key + "[" + std::to_string(i) + "]", in_nested,
                                      report);
                    }
                };
                walk("must", n.must);
                walk("should", n.should);
                walk("must_not", n.must_not);
                walk("filter", n.filter);
            } else if constexpr (std::is_same_v<T, Match>) {
                const auto fpath = path + ".match." + n.field;
                auto role = check_field(n.field, fpath);
                if (role && *role != FieldRole::Text && *role != FieldRole::SegmentText) {
                    report.add(fpath, "match on non-text field '" + n.field + "'");
                }
            } else if constexpr (std::is_same_v<T, Term>) {
                const auto fpath = path + ".term." + n.field;
                auto role = check_field(n.field, fpath);
                if (!role) return;
                if (*role != FieldRole::Keyword && *role != FieldRole::Date && *role != FieldRole::Integer) {
                    report.add(fpath, "term on non-keyword field '" + n.field + "'");
                } else if (*role == FieldRole::Integer && !std::holds_alternative<std::int64_t>(n.value)) {
                    report.add(fpath, "term on integer field needs an integer value");
                } else if (*role != FieldRole::Integer && !std::holds_alternative<std::string>(n.value)) {
                    report.add(fpath, "term on '" + n.field + "' needs a string value");
                } else if (*role == FieldRole::Date && !is_date_literal(std::get<std::string>(n.value))) {
                    report.add(fpath, "date value must be YYYY-MM-DD or YYYY-MM-DDTHH:MM:SSZ");
                }
            } else if constexpr (std::is_same_v<T, Range>) {
                const auto fpath = path + ".range." + n.field;
                auto role = check_field(n.field, fpath);
                if (!role) return;
                if (*role != FieldRole::Date && *role != FieldRole::Integer) {
                    report.add(fpath, "range on non-date/integer field '" + n.field + "'");
                    return;
                }
                for (const auto* bound : {&n.gte, &n.lte}) {
                    if (!*bound) continue;
                    if (*role == FieldRole::Integer && !std::holds_alternative<std::int64_t>(**bound)) {
                        report.add(fpath, "integer range bounds must be integers");
                    }
                    if (*role == FieldRole::Date) {
                        const auto* s = std::get_if<std::string>(&**bound);
                        if (!s || !is_date_literal(*s)) {
                            report.add(fpath, "date range bounds must be YYYY-MM-DD or YYYY-MM-DDTHH:MM:SSZ");
                        }
                    }
                }
            } else if constexpr (std::is_same_v<T, Nested>) {
                const auto npath = path + ".nested";
                if (in_nested) report.add(npath, "nested inside nested is not supported");
                if (schema.nested_field() != n.path) {
                    report.add(npath + ".path", "nested path '" + n.path + "' is not the schema's nested_segment field");
                }
                validate_node(*n.query, schema, npath + ".query", true, report);
            } else {
                const auto fpath = path + ".knn." + n.field;
                auto role = check_field(n.field, fpath);
                if (role && *role != FieldRole::SegmentVector) {
                    report.add(fpath, "knn must target the segment vector field");
                }
                if (!in_nested) report.add(fpath, "knn must be nested");
                if (n.k < 1 || n.k > kMaxWindow) report.add(fpath + ".k", "k must be in [1, 10000]");
                if (n.query_text.find_first_not_of(" \t\r\n") == std::string::npos) {
                    report.add(fpath + ".query_text", "knn query_text is empty");
                }
            }
        },
        q.node);
}

} // namespace

ValidationReport validate(const Query& q, const IndexSchema& schema, const std::string& json_path) {
    ValidationReport report;
    validate_node(q, schema, json_path, false, report);
    return report;
}

ValidationReport validate(const Request& r, const IndexSchema& schema) {
    auto report = validate(r.query, schema, "$.query");
    if (r.fusion) {
        try {
            validate_fusion(*r.fusion);
        } catch (const Error& e) {
            report.add("$.fusion", e.what());
        }
    }
    return report;
}

std::string_view grammar_json_schema() noexcept { return resources::query_dsl_schema(); }

} // namespace evidex::dsl
