#pragma once

#include <nlohmann/json.hpp>

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evidex {

enum class FieldType { Keyword, Text, Date, Integer, NestedSegment };

std::string_view to_string(FieldType type) noexcept;
std::optional<FieldType> field_type_from_string(std::string_view name) noexcept;

/// Sub-field names living under the schema's nested_segment field.
inline constexpr std::string_view kSegmentTextSubfield = "segment_text";
inline constexpr std::string_view kSegmentVectorSubfield = "segment_vector";
inline constexpr std::size_t kEmbeddingDim = 384;

/// What a (possibly dotted) field reference points at.
enum class FieldRole { Keyword, Text, Date, Integer, NestedRoot, SegmentText, SegmentVector };

struct Violation {
    std::string field;
    std::string message;

    bool operator==(const Violation&) const = default;
};

struct ValidationReport {
    std::vector<Violation> violations;

    bool ok() const noexcept { return violations.empty(); }
    void add(std::string field, std::string message) {
        violations.push_back({std::move(field), std::move(message)});
    }
    /// True when any violation message contains `needle`.
    bool mentions(std::string_view needle) const;
    std::string summary() const;
};

struct IndexSchema {
    std::string name;
    std::int64_t version = 1;
    std::map<std::string, FieldType> fields;

    std::optional<FieldType> type_of(std::string_view field) const;
    /// Name of the nested_segment field, if the schema has exactly one.
    std::optional<std::string> nested_field() const;
    /// Resolves plain names and `<nested>.segment_text` / `<nested>.segment_vector`.
    std::optional<FieldRole> resolve(std::string_view field) const;
    std::string segment_text_path() const;
    std::string segment_vector_path() const;

    bool operator==(const IndexSchema&) const = default;
};

ValidationReport validate_schema(const IndexSchema& schema);

/// Nine-field schema for Enron-style maildir corpora.
IndexSchema default_enron_schema();

/// `{"fields":{...},"name":...,"version":...}` with sorted keys; this exact
/// text is what the translator prompt embeds.
nlohmann::json schema_to_json(const IndexSchema& schema);
std::string schema_json_text(const IndexSchema& schema);
IndexSchema schema_from_json(const nlohmann::json& j);

/// Single-writer holder of the active schema. Every accepted change bumps
/// the version by one.
class SchemaRegistry {
public:
    explicit SchemaRegistry(IndexSchema initial);

    IndexSchema current() const;
    /// Replaces the field map; returns the new version. Invalid schemas are rejected.
    std::int64_t update(std::map<std::string, FieldType> fields);

private:
    mutable std::mutex mutex_;
    IndexSchema schema_;
};

} // namespace evidex
