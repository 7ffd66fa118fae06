#pragma once

#include "evidex/model.hpp"

#include <nlohmann/json.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace evidex {

/// Per-corpus segmentation settings.
struct ChunkProfile {
    int target_words = 200;
    int max_words = 400;
    std::vector<std::string> boundary_patterns = default_boundary_patterns();
    int overlap_words = 0;

    /// Timestamp at line start and a short speaker label ending in ':'.
    static std::vector<std::string> default_boundary_patterns();
};

/// Throws InvalidArgument unless 0 < target_words <= max_words, overlap is
/// non-negative and every pattern compiles.
void validate_profile(const ChunkProfile& profile);

nlohmann::json profile_to_json(const ChunkProfile& profile);
/// Missing keys keep their defaults; unknown keys are rejected.
ChunkProfile profile_from_json(const nlohmann::json& j);

struct Chunk {
    std::string text;  // span contents with surrounding whitespace trimmed
    CharSpan span;

    bool operator==(const Chunk&) const = default;
};

/// Splits at blank-line paragraph breaks and at lines matching a boundary
/// pattern, greedily merges consecutive pieces while the running word count
/// stays within target_words, then force-splits any chunk above max_words
/// after the last sentence end among its final 50 allowed words (or at the
/// word limit). Spans are contiguous and cover the whole input.
///
/// With overlap_words > 0 each chunk's text is prefixed with up to that many
/// trailing words of the previous chunk, capped so the text stays within
/// max_words. Spans are unaffected.
std::vector<Chunk> chunk_heuristic(std::string_view text, const ChunkProfile& profile = {});

std::size_t count_words(std::string_view text);

} // namespace evidex
