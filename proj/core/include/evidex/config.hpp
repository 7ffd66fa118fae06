#pragma once

#include "evidex/chunking.hpp"
#include "evidex/embedding.hpp"
#include "evidex/fusion.hpp"
#include "evidex/translation.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

namespace evidex {

struct EmbedderConfig {
    EmbedderKind kind = EmbedderKind::Hashing;
    RemoteEmbedderOptions remote;
};

struct TranslatorConfig {
    TranslatorKind kind = TranslatorKind::RuleBased;
    RemoteTranslatorOptions remote;
};

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path data_dir = "evidex-data";
    std::string cors_origin = "*";
    EmbedderConfig embedder;
    TranslatorConfig translator;
    std::optional<std::filesystem::path> synonyms;
    ChunkProfile chunk_profile;
    FusionConfig fusion;
    int ingest_workers = 1;
};

/// Keys mirror the struct: {"host", "port", "data_dir", "cors_origin",
/// "embedder": {"kind", "url", "timeout_ms", "max_inflight"},
/// "translator": {"kind", "url", "timeout_ms", "max_tokens", "max_inflight"},
/// "synonyms", "chunk_profile": {...}, "fusion": {...}, "ingest_workers"}.
/// Unknown keys raise ParseError.
ServiceConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ServiceConfig& config);
ServiceConfig load_config(const std::filesystem::path& path);

/// EVIDEX_HOST, EVIDEX_PORT, EVIDEX_DATA_DIR, EVIDEX_CORS_ORIGIN,
/// EVIDEX_TRANSLATOR_URL, EVIDEX_EMBEDDER_URL, EVIDEX_SYNONYMS. `env` maps
/// names to values; unset names are ignored.
void apply_env_overrides(ServiceConfig& config, const std::map<std::string, std::string>& env);
/// Collects the variables above from the process environment.
std::map<std::string, std::string> process_env();

std::shared_ptr<const Embedder> make_embedder(const EmbedderConfig& config);

} // namespace evidex
