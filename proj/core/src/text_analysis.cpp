#include "evidex/text_analysis.hpp"

#include "detail/utf8.hpp"
#include "evidex/error.hpp"

#include <fstream>
#include <sstream>

namespace evidex {

TokenStream tokenize(std::string_view text) {
    TokenStream out;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        out.push_back({std::move(current), static_cast<int>(out.size())});
        current.clear();
    };
    for (char32_t cp : detail::decode_utf8_lenient(text)) {
        if (detail::is_alnum(cp)) detail::append_utf8(current, detail::to_lower(cp));
        else flush();
    }
    flush();
    return out;
}

std::vector<std::string> tokenize_terms(std::string_view text) {
    std::vector<std::string> terms;
    for (auto& t : tokenize(text)) terms.push_back(std::move(t.term));
    return terms;
}

void SynonymGraph::add_group(std::vector<std::string> terms) {
    std::set<std::string> group(terms.begin(), terms.end());
    if (group.size() < 2) throw Error(ErrorCode::InvalidArgument, "synonym group needs at least two distinct terms");
    for (const auto& t : group) {
        if (group_of_.count(t)) {
            throw Error(ErrorCode::SynonymConflict, "term '" + t + "' appears in two synonym groups", {{"term", t}});
        }
    }
    for (const auto& t : group) group_of_[t] = groups_.size();
    groups_.push_back(std::move(group));
}

std::set<std::string> SynonymGraph::expand(const std::string& term) const {
    auto it = group_of_.find(term);
    if (it == group_of_.end()) return {term};
    return groups_[it->second];
}

SynonymGraph load_synonym_groups(std::string_view source, std::vector<std::string>* malformed) {
    SynonymGraph graph;
    std::istringstream in{std::string(source)};
    std::string line;
    int line_no = 0;
    auto report = [&](const std::string& reason) {
        if (malformed) malformed->push_back("line " + std::to_string(line_no) + ": " + reason);
    };
    while (std::getline(in, line)) {
        ++line_no;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;

        std::vector<std::string> terms;
        bool ok = true;
        std::istringstream entries(line);
        std::string entry;
        while (std::getline(entries, entry, ',')) {
            auto tokens = tokenize_terms(entry);
            if (tokens.empty()) continue;
            if (tokens.size() > 1) {
                report("multi-word entry '" + entry + "'");
                ok = false;
                break;
            }
            terms.push_back(tokens.front());
        }
        if (!ok) continue;
        std::set<std::string> distinct(terms.begin(), terms.end());
        if (distinct.size() < 2) {
            report("group needs at least two distinct terms");
            continue;
        }
        graph.add_group(std::move(terms));
    }
    return graph;
}

SynonymGraph load_synonym_file(const std::string& path, std::vector<std::string>* malformed) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open synonym file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return load_synonym_groups(buf.str(), malformed);
}

} // namespace evidex
