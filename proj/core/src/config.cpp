#include "evidex/config.hpp"

#include "evidex/error.hpp"

#include "detail/io.hpp"

#include <cstdlib>

namespace evidex {
namespace {

[[noreturn]] void fail(const std::string& path, const std::string& reason) {
    throw Error(ErrorCode::ParseError, path + ": " + reason, {{"json_path", path}, {"reason", reason}});
}

template <typename T>
T get(const nlohmann::json& v, const std::string& path) {
    try {
        return v.get<T>();
    } catch (const nlohmann::json::exception&) {
        fail(path, "wrong type");
    }
}

} // namespace

ServiceConfig config_from_json(const nlohmann::json& j) {
    if (!j.is_object()) fail("$", "expected an object");
    ServiceConfig c;
    for (const auto& [key, value] : j.items()) {
        const auto path = "$." + key;
        if (key == "host") c.host = get<std::string>(value, path);
        else if (key == "port") c.port = get<int>(value, path);
        else if (key == "data_dir") c.data_dir = get<std::string>(value, path);
        else if (key == "cors_origin") c.cors_origin = get<std::string>(value, path);
        else if (key == "synonyms") c.synonyms = get<std::string>(value, path);
        else if (key == "ingest_workers") c.ingest_workers = get<int>(value, path);
        else if (key == "chunk_profile") c.chunk_profile = profile_from_json(value);
        else if (key == "fusion") {
            c.fusion = fusion_from_json(value, path);
            validate_fusion(c.fusion);
        } else if (key == "embedder") {
            if (!value.is_object()) fail(path, "expected an object");
            for (const auto& [k, v] : value.items()) {
                const auto p = path + "." + k;
                if (k == "kind") {
                    auto s = get<std::string>(v, p);
                    if (s == "hashing") c.embedder.kind = EmbedderKind::Hashing;
                    else if (s == "remote") c.embedder.kind = EmbedderKind::Remote;
                    else fail(p, "expected hashing or remote");
                } else if (k == "url") c.embedder.remote.url = get<std::string>(v, p);
                else if (k == "timeout_ms") c.embedder.remote.timeout = std::chrono::milliseconds(get<int>(v, p));
                else if (k == "max_inflight") c.embedder.remote.max_inflight = get<int>(v, p);
                else fail(p, "unknown option");
            }
        } else if (key == "translator") {
            if (!value.is_object()) fail(path, "expected an object");
            for (const auto& [k, v] : value.items()) {
                const auto p = path + "." + k;
                if (k == "kind") {
                    auto kind = translator_kind_from_string(get<std::string>(v, p));
                    if (!kind || *kind == TranslatorKind::Manual) fail(p, "expected rule_based or remote");
                    c.translator.kind = *kind;
                } else if (k == "url") c.translator.remote.url = get<std::string>(v, p);
                else if (k == "timeout_ms") c.translator.remote.timeout = std::chrono::milliseconds(get<int>(v, p));
                else if (k == "max_tokens") c.translator.remote.max_tokens = get<int>(v, p);
                else if (k == "max_inflight") c.translator.remote.max_inflight = get<int>(v, p);
                else fail(p, "unknown option");
            }
        } else {
            fail(path, "unknown option");
        }
    }
    if (c.port < 0 || c.port > 65535) fail("$.port", "out of range");
    return c;
}

nlohmann::json config_to_json(const ServiceConfig& c) {
    nlohmann::json j = {
        {"host", c.host},
        {"port", c.port},
        {"data_dir", c.data_dir.string()},
        {"cors_origin", c.cors_origin},
        {"embedder",
         {{"kind", std::string(to_string(c.embedder.kind))},
          {"url", c.embedder.remote.url},
          {"timeout_ms", c.embedder.remote.timeout.count()},
          {"max_inflight", c.embedder.remote.max_inflight}}},
        {"translator",
         {{"kind", std::string(to_string(c.translator.kind))},
          {"url", c.translator.remote.url},
          {"timeout_ms", c.translator.remote.timeout.count()},
          {"max_tokens", c.translator.remote.max_tokens},
          {"max_inflight", c.translator.remote.max_inflight}}},
        {"chunk_profile", profile_to_json(c.chunk_profile)},
        {"fusion", fusion_to_json(c.fusion)},
        {"ingest_workers", c.ingest_workers},
    };
    if (c.synonyms) j["synonyms"] = c.synonyms->string();
    return j;
}

ServiceConfig load_config(const std::filesystem::path& path) {
    auto j = nlohmann::json::parse(detail::read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::ParseError, "config file is not JSON", {{"path", path.string()}});
    return config_from_json(j);
}

void apply_env_overrides(ServiceConfig& c, const std::map<std::string, std::string>& env) {
    auto find = [&](const char* name) -> const std::string* {
        auto it = env.find(name);
        return it == env.end() ? nullptr : &it->second;
    };
    if (auto* v = find("EVIDEX_HOST")) c.host = *v;
    if (auto* v = find("EVIDEX_PORT")) {
        try {
            c.port = std::stoi(*v);
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "EVIDEX_PORT is not a number", {{"value", *v}});
        }
    }
    if (auto* v = find("EVIDEX_DATA_DIR")) c.data_dir = *v;
    if (auto* v = find("EVIDEX_CORS_ORIGIN")) c.cors_origin = *v;
    if (auto* v = find("EVIDEX_SYNONYMS")) c.synonyms = *v;
    if (auto* v = find("EVIDEX_TRANSLATOR_URL")) {
        c.translator.remote.url = *v;
        c.translator.kind = TranslatorKind::Remote;
    }
    if (auto* v = find("EVIDEX_EMBEDDER_URL")) {
        c.embedder.remote.url = *v;
        c.embedder.kind = EmbedderKind::Remote;
    }
}

std::map<std::string, std::string> process_env() {
    std::map<std::string, std::string> env;
    for (const char* name : {"EVIDEX_HOST", "EVIDEX_PORT", "EVIDEX_DATA_DIR", "EVIDEX_CORS_ORIGIN", "EVIDEX_SYNONYMS",
                             "EVIDEX_TRANSLATOR_URL", "EVIDEX_EMBEDDER_URL"}) {
        if (const char* v = std::getenv(name)) env[name] = v;
    }
    return env;
}

std::shared_ptr<const Embedder> make_embedder(const EmbedderConfig& config) {
    if (config.kind == EmbedderKind::Remote) return std::make_shared<RemoteEmbedder>(config.remote);
    return std::make_shared<HashingEmbedder>();
}

} // namespace evidex
