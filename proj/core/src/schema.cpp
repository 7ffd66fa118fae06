#include "evidex/schema.hpp"

#include "evidex/error.hpp"

#include <regex>
#include <sstream>

namespace evidex {

std::string_view to_string(FieldType type) noexcept {
    switch (type) {
    case FieldType::Keyword: return "keyword";
    case FieldType::Text: return "text";
    case FieldType::Date: return "date";
    case FieldType::Integer: return "integer";
    case FieldType::NestedSegment: return "nested_segment";
    }
    return "keyword";
}

std::optional<FieldType> field_type_from_string(std::string_view name) noexcept {
    if (name == "keyword") return FieldType::Keyword;
    if (name == "text") return FieldType::Text;
    if (name == "date") return FieldType::Date;
    if (name == "integer") return FieldType::Integer;
    if (name == "nested_segment") return FieldType::NestedSegment;
    return std::nullopt;
}

bool ValidationReport::mentions(std::string_view needle) const {
    for (const auto& v : violations) {
        if (v.message.find(needle) != std::string::npos) return true;
    }
    return false;
}

std::string ValidationReport::summary() const {
    std::ostringstream out;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) out << "; ";
        out << violations[i].field << ": " << violations[i].message;
    }
    return out.str();
}

std::optional<FieldType> IndexSchema::type_of(std::string_view field) const {
    auto it = fields.find(std::string(field));
    if (it == fields.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> IndexSchema::nested_field() const {
    std::optional<std::string> found;
    for (const auto& [name, type] : fields) {
        if (type != FieldType::NestedSegment) continue;
        if (found) return std::nullopt;
        found = name;
    }
    return found;
}

std::optional<FieldRole> IndexSchema::resolve(std::string_view field) const {
    auto dot = field.find('.');
    if (dot == std::string_view::npos) {
        auto type = type_of(field);
        if (!type) return std::nullopt;
        switch (*type) {
        case FieldType::Keyword: return FieldRole::Keyword;
        case FieldType::Text: return FieldRole::Text;
        case FieldType::Date: return FieldRole::Date;
        case FieldType::Integer: return FieldRole::Integer;
        case FieldType::NestedSegment: return FieldRole::NestedRoot;
        }
        return std::nullopt;
    }
    auto parent = type_of(field.substr(0, dot));
    if (parent != FieldType::NestedSegment) return std::nullopt;
    auto sub = field.substr(dot + 1);
    if (sub == kSegmentTextSubfield) return FieldRole::SegmentText;
    if (sub == kSegmentVectorSubfield) return FieldRole::SegmentVector;
    return std::nullopt;
}

std::string IndexSchema::segment_text_path() const {
    return nested_field().value_or("segments") + "." + std::string(kSegmentTextSubfield);
}

std::string IndexSchema::segment_vector_path() const {
    return nested_field().value_or("segments") + "." + std::string(kSegmentVectorSubfield);
}

ValidationReport validate_schema(const IndexSchema& schema) {
    static const std::regex kFieldName("[a-z][a-z0-9_]*");
    ValidationReport report;
    int text_fields = 0;
    int nested_fields = 0;
    for (const auto& [name, type] : schema.fields) {
        if (name.empty() || !std::regex_match(name, kFieldName)) {
            report.add(name, "invalid field name (expected [a-z][a-z0-9_]*)");
        }
        if (type == FieldType::Text) ++text_fields;
        if (type == FieldType::NestedSegment) {
            if (++nested_fields == 2) report.add(name, "duplicate nested_segment");
        }
    }
    if (text_fields == 0) report.add("", "no text field");
    if (nested_fields == 0) report.add("", "no nested_segment field");
    if (schema.version < 1) report.add("", "version must be >= 1");
    return report;
}

IndexSchema default_enron_schema() {
    IndexSchema schema;
    schema.name = "enron";
    schema.version = 1;
    schema.fields = {
        {"message_id", FieldType::Keyword}, {"sender", FieldType::Keyword},
        {"recipients", FieldType::Keyword}, {"people", FieldType::Keyword},
        {"subject", FieldType::Text},       {"body", FieldType::Text},
        {"sent_date", FieldType::Date},     {"folder", FieldType::Keyword},
        {"segments", FieldType::NestedSegment},
    };
    return schema;
}

nlohmann::json schema_to_json(const IndexSchema& schema) {
    nlohmann::json fields = nlohmann::json::object();
    for (const auto& [name, type] : schema.fields) fields[name] = std::string(to_string(type));
    return {{"name", schema.name}, {"version", schema.version}, {"fields", fields}};
}

std::string schema_json_text(const IndexSchema& schema) { return schema_to_json(schema).dump(); }

IndexSchema schema_from_json(const nlohmann::json& j) {
    if (!j.is_object() || !j.contains("fields") || !j.at("fields").is_object()) {
        throw Error(ErrorCode::SchemaMismatch, "schema JSON must be an object with a 'fields' object");
    }
    IndexSchema schema;
    schema.name = j.value("name", "");
    schema.version = j.value("version", std::int64_t{1});
    for (const auto& [name, type] : j.at("fields").items()) {
        auto parsed = type.is_string() ? field_type_from_string(type.get<std::string>()) : std::nullopt;
        if (!parsed) throw Error(ErrorCode::SchemaMismatch, "unknown field type for '" + name + "'");
        schema.fields[name] = *parsed;
    }
    return schema;
}

SchemaRegistry::SchemaRegistry(IndexSchema initial) : schema_(std::move(initial)) {
    auto report = validate_schema(schema_);
    if (!report.ok()) throw Error(ErrorCode::SchemaMismatch, "invalid schema: " + report.summary());
}

IndexSchema SchemaRegistry::current() const {
    std::lock_guard lock(mutex_);
    return schema_;
}

std::int64_t SchemaRegistry::update(std::map<std::string, FieldType> fields) {
    std::lock_guard lock(mutex_);
    IndexSchema next = schema_;
    next.fields = std::move(fields);
    next.version = schema_.version + 1;
    auto report = validate_schema(next);
    if (!report.ok()) throw Error(ErrorCode::SchemaMismatch, "invalid schema: " + report.summary());
    schema_ = std::move(next);
    return schema_.version;
}

} // namespace evidex
