#pragma once

// Brute-force reference implementations. None of these call into the index
// code they are compared against.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace oracle {

// ASCII-only: lowercase, split on anything that is not a letter or digit.
inline std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (unsigned char c : text) {
        if (std::isalnum(c)) {
            cur.push_back(static_cast<char>(std::tolower(c)));
        } else if (!cur.empty()) {
            out.push_back(cur);
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

struct Scored {
    std::string id;
    double score = 0.0;
};

inline void sort_scored(std::vector<Scored>& v) {
    std::sort(v.begin(), v.end(), [](const Scored& a, const Scored& b) {
        if (a.score != b.score) return a.score > b.score;
        return a.id < b.id;
    });
}

// Okapi BM25 straight from the definition: for every document and every
// query term group, take the best-scoring alternative and add it up.
inline std::vector<Scored> bm25(const std::vector<std::pair<std::string, std::string>>& docs,
                                const std::vector<std::set<std::string>>& query, double k1 = 1.2, double b = 0.75) {
    const double n = static_cast<double>(docs.size());
    std::vector<std::vector<std::string>> toks;
    double total = 0.0;
    for (const auto& [id, text] : docs) {
        toks.push_back(tokenize(text));
        total += static_cast<double>(toks.back().size());
    }
    const double avg = n > 0 ? total / n : 0.0;
    auto df = [&](const std::string& term) {
        double count = 0;
        for (const auto& t : toks)
            if (std::find(t.begin(), t.end(), term) != t.end()) count += 1;
        return count;
    };
    std::vector<Scored> out;
    for (std::size_t d = 0; d < docs.size(); ++d) {
        double score = 0.0;
        bool matched = false;
        for (const auto& group : query) {
            double best = 0.0;
            bool any = false;
            for (const auto& term : group) {
                double tf = static_cast<double>(std::count(toks[d].begin(), toks[d].end(), term));
                if (tf == 0) continue;
                double f = df(term);
                double idf = std::log(1.0 + (n - f + 0.5) / (f + 0.5));
                double len = static_cast<double>(toks[d].size());
                double w = idf * tf * (k1 + 1.0) / (tf + k1 * (1.0 - b + b * len / avg));
                if (!any || w > best) best = w;
                any = true;
            }
            if (any) {
                score += best;
                matched = true;
            }
        }
        if (matched) out.push_back({docs[d].first, score});
    }
    sort_scored(out);
    return out;
}

inline double dot(const std::vector<float>& a, const std::vector<float>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
    return s;
}

// Indices of the k largest dot products, ties to the lower index.
inline std::vector<std::size_t> exact_knn(const std::vector<std::vector<float>>& data, const std::vector<float>& q,
                                          std::size_t k) {
    std::vector<std::pair<double, std::size_t>> all;
    for (std::size_t i = 0; i < data.size(); ++i) all.emplace_back(dot(data[i], q), i);
    std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
        if (a.first != b.first) return a.first > b.first;
        return a.second < b.second;
    });
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < std::min(k, all.size()); ++i) out.push_back(all[i].second);
    return out;
}

// Boolean predicate over one segment's token set.
struct SegmentPredicate {
    std::vector<std::string> must;
    std::vector<std::string> should;
    std::vector<std::string> must_not;

    bool eval(const std::set<std::string>& tokens) const {
        for (const auto& t : must)
            if (!tokens.contains(t)) return false;
        for (const auto& t : must_not)
            if (tokens.contains(t)) return false;
        if (must.empty() && !should.empty()) {
            bool any = false;
            for (const auto& t : should) any = any || tokens.contains(t);
            if (!any) return false;
        }
        return true;
    }
};

// A document matches a nested block iff one of its segments satisfies the
// whole predicate on its own.
inline bool nested_matches(const std::vector<std::string>& segments, const SegmentPredicate& pred) {
    for (const auto& s : segments) {
        auto toks = tokenize(s);
        if (pred.eval(std::set<std::string>(toks.begin(), toks.end()))) return true;
    }
    return false;
}

// The same predicate over the concatenation of all segments.
inline bool flattened_matches(const std::vector<std::string>& segments, const SegmentPredicate& pred) {
    std::set<std::string> all;
    for (const auto& s : segments)
        for (auto& t : tokenize(s)) all.insert(t);
    return pred.eval(all);
}

// Min-max normalize, weight, sum, sort; written independently of fusion.cpp.
inline std::vector<std::string> fuse(const std::map<std::string, double>& lex, const std::map<std::string, double>& sem,
                                     double w_lex, double w_sem) {
    auto norm = [](const std::map<std::string, double>& m) {
        std::map<std::string, double> out;
        if (m.empty()) return out;
        double lo = m.begin()->second, hi = lo;
        for (const auto& [k, v] : m) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        for (const auto& [k, v] : m) out[k] = hi > lo ? (v - lo) / (hi - lo) : (v > 0 ? 1.0 : 0.0);
        return out;
    };
    const double total = w_lex + w_sem;
    w_lex /= total;
    w_sem /= total;
    auto nl = norm(lex), ns = norm(sem);
    std::set<std::string> ids;
    if (w_lex > 0)
        for (const auto& [k, v] : lex) ids.insert(k);
    if (w_sem > 0)
        for (const auto& [k, v] : sem) ids.insert(k);
    std::vector<Scored> scored;
    for (const auto& id : ids) {
        double s = 0.0;
        if (auto it = nl.find(id); it != nl.end()) s += w_lex * it->second;
        if (auto it = ns.find(id); it != ns.end()) s += w_sem * it->second;
        scored.push_back({id, s});
    }
    sort_scored(scored);
    std::vector<std::string> out;
    for (const auto& s : scored) out.push_back(s.id);
    return out;
}

// Every run of five consecutive tokens.
inline std::set<std::string> shingles(const std::string& text, std::size_t n = 5) {
    auto toks = tokenize(text);
    std::set<std::string> out;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        std::string s;
        for (std::size_t j = 0; j < n; ++j) s += (j ? " " : "") + toks[i + j];
        out.insert(s);
    }
    return out;
}

} // namespace oracle
