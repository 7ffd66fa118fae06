#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace evidex {

enum class ErrorCode {
    InvalidArgument,
    NotFound,
    SchemaMismatch,
    UnknownField,
    DuplicateDocument,
    DuplicateSegment,
    InvalidVector,
    DimensionMismatch,
    EmbedderUnavailable,
    SynonymConflict,
    ParseError,
    ValidationFailed,
    InvalidFusionConfig,
    MalformedMessage,
    QueueUnavailable,
    EmptyIntent,
    TranslatorUnavailable,
    UntranslatableResponse,
    AuditReject,
    FormatMismatch,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code and structured details.
///
/// `details` is surfaced verbatim in the REST error envelope, so it should
/// only hold data the investigator needs to refine a query (json paths,
/// rule ids, the raw translator reply), never document payloads.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message, nlohmann::json details = nlohmann::json::object())
        : std::runtime_error(message), code_(code), details_(std::move(details)) {}

    ErrorCode code() const noexcept { return code_; }
    const nlohmann::json& details() const noexcept { return details_; }

private:
    ErrorCode code_;
    nlohmann::json details_;
};

} // namespace evidex
