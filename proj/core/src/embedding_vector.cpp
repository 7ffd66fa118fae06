#include "evidex/embedding_vector.hpp"

#include "evidex/error.hpp"

#include <cmath>

namespace evidex {

namespace {

template <typename T>
EmbeddingVector normalize_impl(std::span<const T> raw, auto make) {
    if (raw.size() != kEmbeddingDim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "expected " + std::to_string(kEmbeddingDim) + " components, got " + std::to_string(raw.size()));
    }
    double sum = 0.0;
    for (T x : raw) sum += static_cast<double>(x) * static_cast<double>(x);
    double norm = std::sqrt(sum);
    if (!(norm > 0.0) || !std::isfinite(norm)) return EmbeddingVector::basis(0);
    std::vector<float> out(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) out[i] = static_cast<float>(static_cast<double>(raw[i]) / norm);
    return make(std::move(out));
}

} // namespace

EmbeddingVector EmbeddingVector::normalize(std::span<const double> raw) {
    return normalize_impl(raw, [](std::vector<float> v) { return EmbeddingVector(std::move(v)); });
}

EmbeddingVector EmbeddingVector::normalize(std::span<const float> raw) {
    return normalize_impl(raw, [](std::vector<float> v) { return EmbeddingVector(std::move(v)); });
}

EmbeddingVector EmbeddingVector::from_unit(std::vector<float> values) {
    if (values.size() != kEmbeddingDim) {
        throw Error(ErrorCode::DimensionMismatch,
                    "expected " + std::to_string(kEmbeddingDim) + " components, got " + std::to_string(values.size()));
    }
    for (float x : values) {
        if (!std::isfinite(x)) throw Error(ErrorCode::InvalidVector, "vector has non-finite component");
    }
    if (!is_unit_norm(values)) throw Error(ErrorCode::InvalidVector, "vector is not unit norm");
    return EmbeddingVector(std::move(values));
}

EmbeddingVector EmbeddingVector::basis(std::size_t axis) {
    std::vector<float> v(kEmbeddingDim, 0.0f);
    v.at(axis) = 1.0f;
    return EmbeddingVector(std::move(v));
}

double l2_norm(std::span<const float> v) noexcept {
    double sum = 0.0;
    for (float x : v) sum += static_cast<double>(x) * static_cast<double>(x);
    return std::sqrt(sum);
}

bool is_unit_norm(std::span<const float> v, double tolerance) noexcept {
    return std::abs(l2_norm(v) - 1.0) <= tolerance;
}

} // namespace evidex
