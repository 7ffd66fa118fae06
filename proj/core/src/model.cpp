#include "evidex/model.hpp"

#include "evidex/error.hpp"

#include <regex>

namespace evidex {

namespace {

const std::regex& iso_utc_pattern() {
    static const std::regex re(R"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2}Z)");
    return re;
}

} // namespace

ValidationReport validate_document(const Document& doc, const IndexSchema& schema) {
    ValidationReport report;
    if (doc.doc_id.empty()) report.add("doc_id", "doc_id must be non-empty");

    for (const auto& [name, value] : doc.fields) {
        auto type = schema.type_of(name);
        if (!type) {
            report.add(name, "unknown field");
            continue;
        }
        switch (*type) {
        case FieldType::Keyword:
            if (std::holds_alternative<std::int64_t>(value)) report.add(name, "keyword field holds an integer");
            break;
        case FieldType::Text:
            if (!std::holds_alternative<std::string>(value)) report.add(name, "text field must hold a string");
            break;
        case FieldType::Date: {
            const auto* s = std::get_if<std::string>(&value);
            if (!s || !std::regex_match(*s, iso_utc_pattern())) {
                report.add(name, "date field must hold a UTC ISO-8601 string (YYYY-MM-DDTHH:MM:SSZ)");
            }
            break;
        }
        case FieldType::Integer:
            if (!std::holds_alternative<std::int64_t>(value)) report.add(name, "integer field must hold an integer");
            break;
        case FieldType::NestedSegment:
            report.add(name, "nested_segment content belongs in segments, not fields");
            break;
        }
    }

    if (!doc.segments.empty() && !schema.nested_field()) {
        report.add("segments", "schema has no nested_segment field");
    }
    int previous = -1;
    for (const auto& seg : doc.segments) {
        const std::string where = "segments[" + std::to_string(seg.ordinal) + "]";
        if (seg.ordinal <= previous) report.add(where, "segments must be ordered by strictly increasing ordinal");
        previous = seg.ordinal;
        if (seg.text.empty()) report.add(where, "segment_text must be non-empty");
        if (seg.span.start >= seg.span.end) report.add(where, "char_span start must be < end");
        if (seg.vector.size() != kEmbeddingDim) report.add(where, "segment_vector must have 384 dimensions");
        else if (!is_unit_norm(seg.vector.values())) report.add(where, "segment_vector must be unit norm");
    }
    return report;
}

nlohmann::json document_to_json(const Document& doc) {
    nlohmann::json fields = nlohmann::json::object();
    for (const auto& [name, value] : doc.fields) {
        std::visit([&](const auto& v) { fields[name] = v; }, value);
    }
    nlohmann::json segments = nlohmann::json::array();
    for (const auto& seg : doc.segments) {
        segments.push_back({{"ordinal", seg.ordinal},
                            {"text", seg.text},
                            {"span", {seg.span.start, seg.span.end}}});
    }
    return {{"doc_id", doc.doc_id},
            {"fields", fields},
            {"segments", segments},
            {"source_uri", doc.source_uri},
            {"schema_version", doc.schema_version}};
}

Document document_from_json(const nlohmann::json& j) {
    Document doc;
    doc.doc_id = j.at("doc_id").get<std::string>();
    doc.source_uri = j.value("source_uri", "");
    doc.schema_version = j.value("schema_version", std::int64_t{1});
    for (const auto& [name, value] : j.at("fields").items()) {
        if (value.is_string()) doc.fields[name] = value.get<std::string>();
        else if (value.is_number_integer()) doc.fields[name] = value.get<std::int64_t>();
        else if (value.is_array()) doc.fields[name] = value.get<std::vector<std::string>>();
        else throw Error(ErrorCode::SchemaMismatch, "unsupported value type for field '" + name + "'");
    }
    for (const auto& s : j.at("segments")) {
        Segment seg;
        seg.ordinal = s.at("ordinal").get<int>();
        seg.text = s.at("text").get<std::string>();
        seg.span = {s.at("span").at(0).get<std::size_t>(), s.at("span").at(1).get<std::size_t>()};
        doc.segments.push_back(std::move(seg));
    }
    return doc;
}

} // namespace evidex
