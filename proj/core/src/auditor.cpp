#include "evidex/auditor.hpp"

#include "evidex/error.hpp"

#include <algorithm>
#include <cctype>
#include <optional>
#include <regex>
#include <set>

namespace evidex {
namespace {

using json = nlohmann::json;
using Path = std::vector<std::string>;

bool is_index(const std::string& c) {
    return !c.empty() && std::all_of(c.begin(), c.end(), [](unsigned char ch) { return std::isdigit(ch); });
}

std::string to_json_path(const Path& p) {
    std::string out = "$";
    for (const auto& c : p) out += is_index(c) ? "[" + c + "]" : "." + c;
    return out;
}

json::json_pointer to_pointer(const Path& p) {
    std::string s;
    for (const auto& c : p) s += "/" + c;
    return json::json_pointer(s);
}

Path slice(const Path& p, std::size_t n) { return Path(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(n)); }

struct Leaf {
    Path path;
    std::string kind;  // match, term, range, knn, nested
    std::string field;
    bool in_nested = false;
};

void walk(const json& node, const Path& path, bool in_nested, std::vector<Leaf>& out) {
    if (!node.is_object() || node.size() != 1) return;
    const auto& [kind, body] = *node.items().begin();
    if (kind == "bool") {
        for (const char* key : {"must", "should", "must_not", "filter"}) {
            if (!body.contains(key)) continue;
            for (std::size_t i = 0; i < body[key].size(); ++i) {
                auto child = path;
                child.insert(child.end(), {"bool", key, std::to_string(i)});
                walk(body[key][i], child, in_nested, out);
            }
        }
    } else if (kind == "nested") {
        out.push_back({path, "nested", body.value("path", ""), in_nested});
        auto child = path;
        child.insert(child.end(), {"nested", "query"});
        walk(body.at("query"), child, true, out);
    } else {
        out.push_back({path, kind, body.begin().key(), in_nested});
    }
}

std::vector<Leaf> leaves(const json& root) {
    std::vector<Leaf> out;
    walk(root.at("query"), {"query"}, false, out);
    return out;
}

[[noreturn]] void reject(const std::string& rule, const Path& path, const std::string& message,
                         const std::vector<Correction>& applied) {
    json corrections = json::array();
    for (const auto& c : applied) corrections.push_back(correction_to_json(c));
    throw Error(ErrorCode::AuditReject, rule + ": " + message,
                {{"rule_id", rule}, {"json_path", to_json_path(path)}, {"message", message}, {"corrections", corrections}});
}

const std::regex& email_re() {
    static const std::regex re(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})");
    return re;
}

const std::regex& name_re() {
    static const std::regex re(R"(\b[A-Z][a-z]+\s+[A-Z][a-z]+\b)");
    return re;
}

const std::regex& date_re() {
    static const std::regex re(R"(\b(\d{4}-\d{2}-\d{2})(T\d{2}:\d{2}:\d{2}Z)?\b)");
    return re;
}

struct Found {
    std::size_t start = 0;
    std::size_t end = 0;
    std::string value;
    bool email = false;
};

std::optional<Found> first_match(const std::string& text, const std::regex& re) {
    std::smatch m;
    if (!std::regex_search(text, m, re)) return std::nullopt;
    return Found{static_cast<std::size_t>(m.position(0)), static_cast<std::size_t>(m.position(0) + m.length(0)),
                 m.str(0), false};
}

std::optional<Found> find_entity(const std::string& text) {
    auto email = first_match(text, email_re());
    if (email) email->email = true;
    auto name = first_match(text, name_re());
    if (email && name) return email->start <= name->start ? email : name;
    return email ? email : name;
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Start of the word immediately before `pos` if it is one of `words`.
std::optional<std::size_t> preceding_word(const std::string& text, std::size_t pos, const std::set<std::string>& words) {
    std::size_t e = pos;
    while (e > 0 && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
    std::size_t s = e;
    while (s > 0 && std::isalpha(static_cast<unsigned char>(text[s - 1]))) --s;
    if (s == e || !words.contains(lower(text.substr(s, e - s)))) return std::nullopt;
    return s;
}

std::string cut(const std::string& text, std::size_t from, std::size_t to) {
    auto joined = text.substr(0, from) + " " + text.substr(to);
    std::string out;
    for (char c : joined) {
        if (std::isspace(static_cast<unsigned char>(c))) {
            if (!out.empty() && out.back() != ' ') out += ' ';
        } else {
            out += c;
        }
    }
    while (!out.empty() && out.back() == ' ') out.pop_back();
    return out;
}

class Pass {
public:
    Pass(json root, const IndexSchema& schema, std::string_view nl)
        : root_(std::move(root)), schema_(schema), nl_(lower(std::string(nl))),
          nested_(schema.nested_field().value_or("segments")) {}

    AuditResult run() {
        check_fields();
        check_types();
        entities_in_knn();
        dates_in_knn();
        wrap_segment_fields();

        dsl::Query query = dsl::Bool{};
        try {
            query = dsl::parse_query_node(root_.at("query"), "$.query");
        } catch (const Error& e) {
            reject("REVALIDATE", {"query"}, e.what(), corrections_);
        }
        auto report = dsl::validate(query, schema_, "$.query");
        if (!report.ok()) {
            const auto& v = report.violations.front();
            throw Error(ErrorCode::AuditReject, "REVALIDATE: " + report.summary(),
                        {{"rule_id", "REVALIDATE"}, {"json_path", v.field}, {"message", v.message},
                         {"corrections", corrections_json()}});
        }
        return {std::move(query), corrections_};
    }

private:
    json corrections_json() const {
        json arr = json::array();
        for (const auto& c : corrections_) arr.push_back(correction_to_json(c));
        return arr;
    }

    // R1
    void check_fields() {
        for (const auto& leaf : leaves(root_)) {
            if (leaf.kind == "nested") {
                if (schema_.nested_field() != leaf.field)
                    reject("R1", leaf.path, "nested path '" + leaf.field + "' is not a nested_segment field", corrections_);
                continue;
            }
            if (!schema_.resolve(leaf.field))
                reject("R1", leaf.path, "unknown field '" + leaf.field + "'", corrections_);
        }
    }

    // R2
    void check_types() {
        for (const auto& leaf : leaves(root_)) {
            if (leaf.kind == "nested") continue;
            auto role = *schema_.resolve(leaf.field);
            const auto& body = root_[to_pointer(leaf.path)].at(leaf.kind).at(leaf.field);
            std::string problem;
            if (leaf.kind == "match") {
                if (role != FieldRole::Text && role != FieldRole::SegmentText) problem = "match needs a text field";
            } else if (leaf.kind == "term") {
                if (role == FieldRole::Integer) {
                    if (!body.is_number_integer()) problem = "term on an integer field needs an integer";
                } else if (role == FieldRole::Keyword || role == FieldRole::Date) {
                    if (!body.is_string()) problem = "term on '" + leaf.field + "' needs a string";
                    else if (role == FieldRole::Date && !dsl::is_date_literal(body.get<std::string>()))
                        problem = "term on a date field needs YYYY-MM-DD or YYYY-MM-DDTHH:MM:SSZ";
                } else {
                    problem = "term needs a keyword, date or integer field";
                }
            } else if (leaf.kind == "range") {
                if (role != FieldRole::Date && role != FieldRole::Integer) problem = "range needs a date or integer field";
                for (const char* b : {"gte", "lte"}) {
                    if (!problem.empty() || !body.contains(b)) continue;
                    const auto& v = body[b];
                    if (role == FieldRole::Integer && !v.is_number_integer()) problem = "integer range bounds must be integers";
                    if (role == FieldRole::Date && (!v.is_string() || !dsl::is_date_literal(v.get<std::string>())))
                        problem = "date range bounds must be YYYY-MM-DD or YYYY-MM-DDTHH:MM:SSZ";
                }
            } else if (leaf.kind == "knn") {
                if (role != FieldRole::SegmentVector) problem = "knn needs the segment vector field";
            }
            if (!problem.empty())
                reject("R2", leaf.path, problem + " ('" + leaf.field + "' is " + role_name(role) + ")", corrections_);
        }
    }

    static std::string role_name(FieldRole role) {
        switch (role) {
        case FieldRole::Keyword: return "keyword";
        case FieldRole::Text: return "text";
        case FieldRole::Date: return "date";
        case FieldRole::Integer: return "integer";
        case FieldRole::NestedRoot: return "nested_segment";
        case FieldRole::SegmentText: return "segment text";
        case FieldRole::SegmentVector: return "segment vector";
        }
        return "unknown";
    }

    std::string date_field() const {
        if (schema_.type_of("sent_date") == FieldType::Date) return "sent_date";
        for (const auto& [name, type] : schema_.fields)
            if (type == FieldType::Date) return name;
        return "sent_date";
    }

    // R3
    void entities_in_knn() {
        static const std::set<std::string> kPrepositions = {"from", "by", "to", "with", "about", "regarding",
                                                            "involving", "mentioning", "of", "for", "between"};
        while (true) {
            bool changed = false;
            for (const auto& leaf : leaves(root_)) {
                if (leaf.kind != "knn") continue;
                auto text = knn_text(leaf);
                auto found = find_entity(text);
                if (!found) continue;
                auto prep = preceding_word(text, found->start, kPrepositions);
                bool from = prep && lower(text.substr(*prep, 4)) == "from";
                auto value = found->email ? lower(found->value) : found->value;
                if (found->email && nl_.find("from " + lower(found->value)) != std::string::npos) from = true;
                std::string field = found->email && from ? "sender" : "people";
                json term = {{"term", {{field, value}}}};
                auto rest = cut(text, prep.value_or(found->start), found->end);
                place(leaf, rest, term, "R3",
                      "moved " + std::string(found->email ? "address" : "name") + " '" + found->value +
                          "' out of knn query_text into a term on " + field);
                changed = true;
                break;
            }
            if (!changed) return;
        }
    }

    // R4
    void dates_in_knn() {
        static const std::set<std::string> kPrepositions = {"on",     "before", "after", "since", "from", "until",
                                                            "in",     "at",     "during", "by",   "dated"};
        while (true) {
            bool changed = false;
            for (const auto& leaf : leaves(root_)) {
                if (leaf.kind != "knn") continue;
                auto text = knn_text(leaf);
                std::smatch m;
                if (!std::regex_search(text, m, date_re())) continue;
                auto start = static_cast<std::size_t>(m.position(0));
                auto end = start + static_cast<std::size_t>(m.length(0));
                auto day = m.str(1);
                auto prep = preceding_word(text, start, kPrepositions);
                json range = {{"range", {{date_field(), {{"gte", day}, {"lte", day}}}}}};
                place(leaf, cut(text, prep.value_or(start), end), range, "R4",
                      "moved date '" + m.str(0) + "' out of knn query_text into a same-day range on " + date_field());
                changed = true;
                break;
            }
            if (!changed) return;
        }
    }

    // R5
    void wrap_segment_fields() {
        while (true) {
            bool changed = false;
            for (const auto& leaf : leaves(root_)) {
                if (leaf.kind == "nested" || leaf.in_nested) continue;
                auto role = schema_.resolve(leaf.field);
                if (role != FieldRole::SegmentText && role != FieldRole::SegmentVector) continue;
                auto ptr = to_pointer(leaf.path);
                auto before = root_[ptr];
                json after = {{"nested", {{"path", nested_}, {"query", before}}}};
                record("R5", leaf.path, before, after,
                       "wrapped " + leaf.kind + " on segment field '" + leaf.field + "' in nested '" + nested_ + "'");
                changed = true;
                break;
            }
            if (!changed) return;
        }
    }

    std::string knn_text(const Leaf& leaf) const {
        return root_[to_pointer(leaf.path)].at("knn").at(leaf.field).value("query_text", "");
    }

    void record(const std::string& rule, const Path& path, const json& before, const json& after,
                const std::string& message) {
        root_[to_pointer(path)] = after;
        corrections_.push_back({rule, to_json_path(path), before, after, message});
    }

    // Rewrites the knn at `leaf` to `rest` (dropping it when empty) and
    // attaches `clause` next to it.
    void place(const Leaf& leaf, const std::string& rest, const json& clause, const std::string& rule,
               const std::string& message) {
        const auto& kp = leaf.path;
        std::size_t outer = kp.size();
        for (std::size_t i = 0; i < kp.size(); ++i) {
            if (kp[i] == "nested") {
                outer = i;
                break;
            }
        }
        const Path x = slice(kp, outer);
        const Path rel(kp.begin() + static_cast<std::ptrdiff_t>(x.size()), kp.end());

        // X' = X with the knn rewritten or removed.
        std::optional<json> x_new = root_[to_pointer(x)];
        if (!rest.empty()) {
            (*x_new)[to_pointer(rel)]["knn"][leaf.field]["query_text"] = rest;
        } else if (rel.empty() || rel == Path{"nested", "query"}) {
            x_new.reset();
        } else {
            auto parent = slice(rel, rel.size() - 1);
            auto& arr = (*x_new)[to_pointer(parent)];
            arr.erase(static_cast<std::size_t>(std::stoul(rel.back())));
            if (arr.empty()) {
                auto list_key = parent.back();
                (*x_new)[to_pointer(slice(parent, parent.size() - 1))].erase(list_key);
            }
        }

        const bool required = x.size() >= 3 && x[x.size() - 3] == "bool" &&
                              (x[x.size() - 2] == "must" || x[x.size() - 2] == "filter");
        if (required) {
            const Path p = slice(x, x.size() - 3);
            auto before = root_[to_pointer(p)];
            auto after = before;
            auto& list = after["bool"][x[x.size() - 2]];
            auto idx = static_cast<std::size_t>(std::stoul(x.back()));
            if (x_new) {
                list[idx] = *x_new;
            } else {
                list.erase(idx);
                if (list.empty()) after["bool"].erase(x[x.size() - 2]);
            }
            after["bool"]["must"].push_back(clause);
            record(rule, p, before, after, message);
        } else {
            auto before = root_[to_pointer(x)];
            json after = x_new ? json{{"bool", {{"must", json::array({*x_new, clause})}}}} : clause;
            record(rule, x, before, after, message);
        }
    }

    json root_;
    const IndexSchema& schema_;
    std::string nl_;
    std::string nested_;
    std::vector<Correction> corrections_;
};

} // namespace

const std::vector<AuditRuleInfo>& audit_rules() {
    static const std::vector<AuditRuleInfo> rules = {
        {"R1", "field or nested path not in the index schema", false},
        {"R2", "clause type does not fit the field type", false},
        {"R3", "person name or address inside knn query_text; moved to a term on people or sender", true},
        {"R4", "date inside knn query_text; moved to a same-day range on the date field", true},
        {"R5", "segment field referenced outside nested; wrapped in nested", true},
    };
    return rules;
}

AuditResult audit_query(const dsl::Query& query, const IndexSchema& schema, std::string_view nl_query) {
    return Pass(json{{"query", dsl::to_json(query)}}, schema, nl_query).run();
}

std::string json_path_to_pointer(std::string_view json_path) {
    if (json_path.empty() || json_path[0] != '$')
        throw Error(ErrorCode::InvalidArgument, "json path must start with '$'", {{"json_path", std::string(json_path)}});
    std::string out;
    std::size_t i = 1;
    while (i < json_path.size()) {
        if (json_path[i] == '.') {
            auto next = json_path.find_first_of(".[", i + 1);
            out += "/" + std::string(json_path.substr(i + 1, next == std::string_view::npos ? std::string_view::npos : next - i - 1));
            i = next == std::string_view::npos ? json_path.size() : next;
        } else if (json_path[i] == '[') {
            auto close = json_path.find(']', i);
            if (close == std::string_view::npos)
                throw Error(ErrorCode::InvalidArgument, "unterminated index in json path", {{"json_path", std::string(json_path)}});
            out += "/" + std::string(json_path.substr(i + 1, close - i - 1));
            i = close + 1;
        } else {
            throw Error(ErrorCode::InvalidArgument, "malformed json path", {{"json_path", std::string(json_path)}});
        }
    }
    return out;
}

dsl::Query replay_corrections(const dsl::Query& query, const std::vector<Correction>& corrections) {
    json root = {{"query", dsl::to_json(query)}};
    for (const auto& c : corrections) root[json::json_pointer(json_path_to_pointer(c.json_path))] = c.after;
    return dsl::parse_query_node(root.at("query"), "$.query");
}

} // namespace evidex
