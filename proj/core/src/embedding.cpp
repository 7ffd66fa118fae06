#include "evidex/embedding.hpp"

#include "detail/http.hpp"
#include "detail/utf8.hpp"
#include "evidex/error.hpp"
#include "evidex/text_analysis.hpp"

#include <httplib.h>

#include <algorithm>
#include <cmath>

namespace evidex {

std::string_view to_string(EmbedderKind kind) noexcept {
    return kind == EmbedderKind::Hashing ? "hashing" : "remote";
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        throw Error(ErrorCode::DimensionMismatch,
                    "cosine of vectors with " + std::to_string(a.size()) + " and " + std::to_string(b.size()) + " dims");
    }
    double dot = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return std::clamp(dot, -1.0, 1.0);
}

std::vector<EmbeddingVector> Embedder::embed_batch(std::span<const std::string> texts) const {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed(t));
    return out;
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed) noexcept {
    std::uint64_t h = seed;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::vector<double> HashingEmbedder::accumulate(std::string_view text) {
    std::vector<double> acc(kEmbeddingDim, 0.0);
    auto add = [&](const std::string& feature) {
        const auto bucket = fnv1a64(feature) % kEmbeddingDim;
        const double sign = (fnv1a64(feature, kSignSeed) >> 63) ? -1.0 : 1.0;
        acc[bucket] += sign;
    };

    auto terms = tokenize_terms(text);
    std::string joined = " ";
    for (const auto& t : terms) {
        add("w:" + t);
        joined += t;
        joined += ' ';
    }
    if (terms.empty()) return acc;

    auto cps = detail::decode_utf8_lenient(joined);
    for (std::size_t i = 0; i + 3 <= cps.size(); ++i) {
        add("c:" + detail::encode_utf8(std::u32string_view(cps).substr(i, 3)));
    }
    return acc;
}

EmbeddingVector HashingEmbedder::embed(std::string_view text) const {
    auto acc = accumulate(text);
    return EmbeddingVector::normalize(std::span<const double>(acc));
}

RemoteEmbedder::RemoteEmbedder(RemoteEmbedderOptions options)
    : options_(std::move(options)), inflight_(std::clamp(options_.max_inflight, 1, 64)) {
    detail::split_url(options_.url);
}

EmbeddingVector RemoteEmbedder::embed(std::string_view text) const {
    std::vector<std::string> one{std::string(text)};
    return embed_batch(one).front();
}

std::vector<EmbeddingVector> RemoteEmbedder::embed_batch(std::span<const std::string> texts) const {
    if (texts.empty()) return {};
    auto url = detail::split_url(options_.url);
    nlohmann::json body = {{"texts", texts}};

    httplib::Result res;
    {
        inflight_.acquire();
        struct Release {
            std::counting_semaphore<64>& s;
            ~Release() { s.release(); }
        } release{inflight_};
        httplib::Client client(url.origin);
        const auto secs = options_.timeout.count() / 1000;
        const auto usecs = (options_.timeout.count() % 1000) * 1000;
        client.set_connection_timeout(secs, usecs);
        client.set_read_timeout(secs, usecs);
        client.set_write_timeout(secs, usecs);
        res = client.Post(url.path, body.dump(), "application/json");
    }
    if (!res) {
        throw Error(ErrorCode::EmbedderUnavailable,
                    "embedding endpoint unreachable: " + httplib::to_string(res.error()), {{"url", options_.url}});
    }
    if (res->status != 200) {
        throw Error(ErrorCode::EmbedderUnavailable, "embedding endpoint returned HTTP " + std::to_string(res->status),
                    {{"url", options_.url}, {"status", res->status}});
    }

    nlohmann::json reply;
    try {
        reply = nlohmann::json::parse(res->body);
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::EmbedderUnavailable, std::string("embedding reply is not JSON: ") + e.what());
    }
    if (!reply.contains("vectors") || !reply["vectors"].is_array() || reply["vectors"].size() != texts.size()) {
        throw Error(ErrorCode::EmbedderUnavailable, "embedding reply must carry one vector per text");
    }
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& v : reply["vectors"]) {
        if (!v.is_array()) throw Error(ErrorCode::EmbedderUnavailable, "embedding reply vector is not an array");
        if (v.size() != kEmbeddingDim) {
            throw Error(ErrorCode::DimensionMismatch,
                        "remote embedder returned " + std::to_string(v.size()) + " dims, expected 384",
                        {{"dims", v.size()}});
        }
        auto raw = v.get<std::vector<double>>();
        out.push_back(EmbeddingVector::normalize(std::span<const double>(raw)));
    }
    return out;
}

} // namespace evidex
