#include "evidex/chunking.hpp"

#include "evidex/error.hpp"

#include <algorithm>
#include <regex>
#include <set>

namespace evidex {
namespace {

bool is_ws(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }

struct Word {
    std::size_t start;
    std::size_t end;
};

std::vector<Word> words_in(std::string_view text, std::size_t from, std::size_t to) {
    std::vector<Word> out;
    std::size_t i = from;
    while (i < to) {
        while (i < to && is_ws(text[i])) ++i;
        if (i >= to) break;
        std::size_t s = i;
        while (i < to && !is_ws(text[i])) ++i;
        out.push_back({s, i});
    }
    return out;
}

bool ends_sentence(std::string_view word) {
    while (!word.empty() && (word.back() == '"' || word.back() == '\'' || word.back() == ')' || word.back() == ']'))
        word.remove_suffix(1);
    return !word.empty() && (word.back() == '.' || word.back() == '!' || word.back() == '?');
}

std::string trimmed(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && is_ws(s[b])) ++b;
    while (e > b && is_ws(s[e - 1])) --e;
    return std::string(s.substr(b, e - b));
}

} // namespace

std::vector<std::string> ChunkProfile::default_boundary_patterns() {
    return {R"(^\d{1,2}[:.]\d{2})", R"(^[A-Z][A-Za-z .'-]{0,40}:)"};
}

void validate_profile(const ChunkProfile& profile) {
    if (profile.target_words <= 0 || profile.target_words > profile.max_words)
        throw Error(ErrorCode::InvalidArgument, "chunk profile requires 0 < target_words <= max_words",
                    {{"target_words", profile.target_words}, {"max_words", profile.max_words}});
    if (profile.overlap_words < 0)
        throw Error(ErrorCode::InvalidArgument, "overlap_words must be non-negative",
                    {{"overlap_words", profile.overlap_words}});
    for (const auto& pattern : profile.boundary_patterns) {
        try {
            std::regex re(pattern);
        } catch (const std::regex_error& e) {
            throw Error(ErrorCode::InvalidArgument, "boundary pattern does not compile",
                        {{"pattern", pattern}, {"reason", e.what()}});
        }
    }
}

nlohmann::json profile_to_json(const ChunkProfile& profile) {
    return {{"target_words", profile.target_words},
            {"max_words", profile.max_words},
            {"boundary_patterns", profile.boundary_patterns},
            {"overlap_words", profile.overlap_words}};
}

ChunkProfile profile_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "chunk profile must be a JSON object", {{"json_path", "$"}});
    ChunkProfile p;
    for (const auto& [key, value] : j.items()) {
        try {
            if (key == "target_words") p.target_words = value.get<int>();
            else if (key == "max_words") p.max_words = value.get<int>();
            else if (key == "overlap_words") p.overlap_words = value.get<int>();
            else if (key == "boundary_patterns") p.boundary_patterns = value.get<std::vector<std::string>>();
            else throw Error(ErrorCode::ParseError, "unknown chunk profile key", {{"json_path", "$." + key}});
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, "wrong type for chunk profile key",
                        {{"json_path", "$." + key}, {"reason", e.what()}});
        }
    }
    validate_profile(p);
    return p;
}

std::size_t count_words(std::string_view text) { return words_in(text, 0, text.size()).size(); }

std::vector<Chunk> chunk_heuristic(std::string_view text, const ChunkProfile& profile) {
    validate_profile(profile);
    if (std::all_of(text.begin(), text.end(), is_ws)) return {};

    std::vector<std::regex> patterns;
    for (const auto& p : profile.boundary_patterns) patterns.emplace_back(p);

    std::set<std::size_t> cuts{0};
    bool prev_blank = false;
    for (std::size_t start = 0; start < text.size();) {
        auto nl = text.find('\n', start);
        std::size_t end = nl == std::string_view::npos ? text.size() : nl;
        std::string line(text.substr(start, end - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        bool blank = std::all_of(line.begin(), line.end(), is_ws);
        if (!blank && start > 0) {
            bool boundary = prev_blank;
            for (const auto& re : patterns)
                if (!boundary && std::regex_search(line, re)) boundary = true;
            if (boundary) cuts.insert(start);
        }
        prev_blank = blank;
        if (nl == std::string_view::npos) break;
        start = nl + 1;
    }

    std::vector<std::size_t> piece_starts(cuts.begin(), cuts.end());
    std::vector<std::size_t> starts;
    std::size_t running = 0;
    for (std::size_t i = 0; i < piece_starts.size(); ++i) {
        std::size_t end = i + 1 < piece_starts.size() ? piece_starts[i + 1] : text.size();
        std::size_t w = words_in(text, piece_starts[i], end).size();
        if (starts.empty()) {
            starts.push_back(piece_starts[i]);
            running = w;
        } else if (running == 0 || w == 0 || running + w <= static_cast<std::size_t>(profile.target_words)) {
            running += w;
        } else {
            starts.push_back(piece_starts[i]);
            running = w;
        }
    }

    const auto max_words = static_cast<std::size_t>(profile.max_words);
    std::vector<std::size_t> final_starts;
    for (std::size_t c = 0; c < starts.size(); ++c) {
        std::size_t end = c + 1 < starts.size() ? starts[c + 1] : text.size();
        final_starts.push_back(starts[c]);
        auto words = words_in(text, starts[c], end);
        std::size_t first = 0;
        while (words.size() - first > max_words) {
            std::size_t limit = first + max_words;
            std::size_t cut = limit;
            std::size_t floor = limit >= 50 ? std::max(first, limit - 50) : first;
            for (std::size_t j = limit; j-- > floor;) {
                auto w = text.substr(words[j].start, words[j].end - words[j].start);
                if (ends_sentence(w)) {
                    cut = j + 1;
                    break;
                }
            }
            final_starts.push_back(words[cut].start);
            first = cut;
        }
    }

    std::vector<Chunk> chunks;
    chunks.reserve(final_starts.size());
    for (std::size_t i = 0; i < final_starts.size(); ++i) {
        std::size_t end = i + 1 < final_starts.size() ? final_starts[i + 1] : text.size();
        Chunk chunk;
        chunk.span = {final_starts[i], end};
        chunk.text = trimmed(text.substr(final_starts[i], end - final_starts[i]));
        chunks.push_back(std::move(chunk));
    }

    if (profile.overlap_words > 0) {
        for (std::size_t i = chunks.size(); i-- > 1;) {
            auto own = count_words(chunks[i].text);
            auto room = own >= max_words ? 0 : max_words - own;
            auto take = std::min<std::size_t>(room, static_cast<std::size_t>(profile.overlap_words));
            if (take == 0) continue;
            const auto& prev = chunks[i - 1].span;
            auto prev_words = words_in(text, prev.start, prev.end);
            take = std::min(take, prev_words.size());
            if (take == 0) continue;
            auto from = prev_words[prev_words.size() - take].start;
            chunks[i].text = trimmed(text.substr(from, prev.end - from)) + " " + chunks[i].text;
        }
    }
    return chunks;
}

} // namespace evidex
