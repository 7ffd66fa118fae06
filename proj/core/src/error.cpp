#include "evidex/error.hpp"

namespace evidex {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::SchemaMismatch: return "SchemaMismatch";
    case ErrorCode::UnknownField: return "UnknownField";
    case ErrorCode::DuplicateDocument: return "DuplicateDocument";
    case ErrorCode::DuplicateSegment: return "DuplicateSegment";
    case ErrorCode::InvalidVector: return "InvalidVector";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmbedderUnavailable: return "EmbedderUnavailable";
    case ErrorCode::SynonymConflict: return "SynonymConflict";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationFailed: return "ValidationFailed";
    case ErrorCode::InvalidFusionConfig: return "InvalidFusionConfig";
    case ErrorCode::MalformedMessage: return "MalformedMessage";
    case ErrorCode::QueueUnavailable: return "QueueUnavailable";
    case ErrorCode::EmptyIntent: return "EmptyIntent";
    case ErrorCode::TranslatorUnavailable: return "TranslatorUnavailable";
    case ErrorCode::UntranslatableResponse: return "UntranslatableResponse";
    case ErrorCode::AuditReject: return "AuditReject";
    case ErrorCode::FormatMismatch: return "FormatMismatch";
    case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

} // namespace evidex
