#pragma once

#include "evidex/embedding_vector.hpp"

#include <chrono>
#include <cstdint>
#include <memory>
#include <semaphore>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace evidex {

enum class EmbedderKind { Hashing, Remote };

std::string_view to_string(EmbedderKind kind) noexcept;

/// Dot product of unit vectors, clamped to [-1, 1]. Throws DimensionMismatch.
double cosine_similarity(std::span<const float> a, std::span<const float> b);
inline double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    return cosine_similarity(a.values(), b.values());
}

class Embedder {
public:
    virtual ~Embedder() = default;

    virtual EmbedderKind kind() const noexcept = 0;
    /// Identifies the embedder in index manifests; indexes refuse to mix descriptors.
    virtual std::string descriptor() const = 0;
    virtual EmbeddingVector embed(std::string_view text) const = 0;
    virtual std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const;
};

/// FNV-1a 64-bit. The hashing embedder's features are bucketed with the
/// standard offset basis and signed with `kSignSeed`.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t seed = 0xcbf29ce484222325ULL) noexcept;

/// Deterministic signed feature-hashing embedder.
///
/// Features are word unigrams (from tokenize, prefixed "w:") and character
/// trigrams (prefixed "c:") of the token sequence joined by single spaces and
/// padded with one space on each side. Feature f adds s(f) to bucket
/// fnv1a64(f) mod 384, where s(f) = +1 if fnv1a64(f, kSignSeed) has its top
/// bit clear, else -1. The accumulated vector is L2-normalized; an empty
/// accumulation maps to e0.
class HashingEmbedder final : public Embedder {
public:
    static constexpr std::uint64_t kSignSeed = 0x9e3779b97f4a7c15ULL;

    EmbedderKind kind() const noexcept override { return EmbedderKind::Hashing; }
    std::string descriptor() const override { return "hashing-fnv1a64-w1c3-384"; }
    EmbeddingVector embed(std::string_view text) const override;

    /// Raw signed accumulation before normalization.
    static std::vector<double> accumulate(std::string_view text);
};

inline EmbeddingVector embed_hashing(std::string_view text) { return HashingEmbedder{}.embed(text); }

struct RemoteEmbedderOptions {
    std::string url;  // e.g. http://127.0.0.1:8081/embed
    std::chrono::milliseconds timeout{5000};
    int max_inflight = 4;
};

/// HTTP client for `POST {"texts":[...]}` → `{"vectors":[[...384 floats...]]}`.
/// Vectors are re-normalized locally. Network failures and timeouts raise
/// EmbedderUnavailable; a wrong dimension raises DimensionMismatch.
class RemoteEmbedder final : public Embedder {
public:
    explicit RemoteEmbedder(RemoteEmbedderOptions options);

    EmbedderKind kind() const noexcept override { return EmbedderKind::Remote; }
    std::string descriptor() const override { return "remote:" + options_.url; }
    EmbeddingVector embed(std::string_view text) const override;
    std::vector<EmbeddingVector> embed_batch(std::span<const std::string> texts) const override;

private:
    RemoteEmbedderOptions options_;
    mutable std::counting_semaphore<64> inflight_;
};

} // namespace evidex
