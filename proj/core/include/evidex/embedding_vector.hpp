#pragma once

#include "evidex/schema.hpp"

#include <span>
#include <vector>

namespace evidex {

/// Unit-norm 384-dimensional vector. Construction always normalizes or
/// validates, so every instance satisfies |‖v‖₂ − 1| ≤ 1e-6.
class EmbeddingVector {
public:
    static constexpr double kNormTolerance = 1e-6;

    /// L2-normalizes `raw`; an all-zero (or non-finite) input maps to e₀.
    static EmbeddingVector normalize(std::span<const double> raw);
    static EmbeddingVector normalize(std::span<const float> raw);
    /// Accepts already-normalized components; throws InvalidVector otherwise.
    static EmbeddingVector from_unit(std::vector<float> values);
    static EmbeddingVector basis(std::size_t axis);

    std::span<const float> values() const noexcept { return values_; }
    std::size_t size() const noexcept { return values_.size(); }
    float operator[](std::size_t i) const noexcept { return values_[i]; }

    bool operator==(const EmbeddingVector&) const = default;

private:
    explicit EmbeddingVector(std::vector<float> values) : values_(std::move(values)) {}
    std::vector<float> values_;
};

double l2_norm(std::span<const float> v) noexcept;
bool is_unit_norm(std::span<const float> v, double tolerance = EmbeddingVector::kNormTolerance) noexcept;

} // namespace evidex
