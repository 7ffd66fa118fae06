#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace evidex {

struct Token {
    std::string term;
    int position = 0;

    bool operator==(const Token&) const = default;
};

using TokenStream = std::vector<Token>;

/// Lowercases and splits on every non-alphanumeric code point. No stemming,
/// no stopwords: identifiers and case numbers survive verbatim.
TokenStream tokenize(std::string_view text);
std::vector<std::string> tokenize_terms(std::string_view text);

/// Flat symmetric synonym groups, applied to lexical clauses at query time
/// only. The index always stores the original terms.
class SynonymGraph {
public:
    SynonymGraph() = default;

    /// Throws SynonymConflict when a term would land in two groups.
    void add_group(std::vector<std::string> terms);

    /// The group containing `term` (term included), or {term}.
    std::set<std::string> expand(const std::string& term) const;

    const std::vector<std::set<std::string>>& groups() const noexcept { return groups_; }
    bool empty() const noexcept { return groups_.empty(); }

private:
    std::vector<std::set<std::string>> groups_;
    std::map<std::string, std::size_t> group_of_;
};

/// Line-oriented comma-separated groups with `#` comments. Lines that do not
/// yield at least two single-term entries are skipped and appended to
/// `malformed` (as "line N: reason") when provided.
SynonymGraph load_synonym_groups(std::string_view source, std::vector<std::string>* malformed = nullptr);
SynonymGraph load_synonym_file(const std::string& path, std::vector<std::string>* malformed = nullptr);

inline std::set<std::string> expand_term(const std::string& term, const SynonymGraph& graph) {
    return graph.expand(term);
}

} // namespace evidex
