#include "evidex/executor.hpp"

#include "evidex/error.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <set>

namespace evidex {

nlohmann::json ExecutionTrace::to_json() const {
    nlohmann::json clause_list = nlohmann::json::array();
    for (const auto& c : clauses) clause_list.push_back({{"json_path", c.json_path}, {"clause", c.clause}, {"hits", c.hits}});
    nlohmann::json violations = nlohmann::json::array();
    for (const auto& v : validation.violations) violations.push_back({{"json_path", v.field}, {"message", v.message}});
    auto range = [](const ScoreRange& r) { return nlohmann::json{{"count", r.count}, {"min", r.min}, {"max", r.max}}; };
    return {{"dsl", dsl},
            {"validation", {{"ok", validation.ok()}, {"violations", violations}}},
            {"clauses", clause_list},
            {"lexical", range(lexical)},
            {"semantic", range(semantic)},
            {"latency_ms", latency_ms}};
}

namespace {

using namespace dsl;

struct Partial {
    std::optional<double> lex;
    std::optional<double> sem;
    std::optional<int> best_segment;

    void absorb(const Partial& other) {
        if (other.lex) lex = lex.value_or(0.0) + *other.lex;
        if (other.sem && (!sem || *other.sem > *sem)) {
            sem = other.sem;
            best_segment = other.best_segment;
        }
    }
};

template <typename Key>
using Matches = std::map<Key, Partial>;

class Evaluator {
public:
    Evaluator(const ExecutionContext& ctx, ExecutionTrace& trace)
        : ctx_(ctx), trace_(trace), schema_(ctx.lexical.schema()), doc_count_(ctx.lexical.doc_count()) {}

    Matches<std::uint32_t> documents(const Query& q, const std::string& path) {
        auto out = std::visit([&](const auto& n) { return doc_clause(n, path); }, q.node);
        record(path, q, out.size());
        return out;
    }

private:
    static const char* clause_name(const Query& q) {
        static constexpr const char* names[] = {"bool", "match", "term", "range", "nested", "knn"};
        return names[q.node.index()];
    }

    void record(const std::string& path, const Query& q, std::size_t hits) {
        trace_.clauses.push_back({path, clause_name(q), hits});
    }

    std::vector<std::set<std::string>> expand(const std::string& text) const {
        std::vector<std::set<std::string>> terms;
        for (const auto& t : tokenize_terms(text)) terms.push_back(ctx_.synonyms.expand(t));
        return terms;
    }

    // Generic bool combination over documents or segments.
    template <typename Key, typename Eval, typename Universe>
    Matches<Key> combine(const Bool& b, const std::string& path, Eval&& eval, Universe&& universe) {
        auto run = [&](const char* key, const std::vector<Query>& list) {
            std::vector<Matches<Key>> results;
            for (std::size_t i = 0; i < list.size(); ++i) {
                results.push_back(eval(list[i], path + ".bool." + key + "[" + std::to_string(i) + "]"));
            }
            return results;
        };
        auto must = run("must", b.must);
        auto filter = run("filter", b.filter);
        auto should = run("should", b.should);
        auto must_not = run("must_not", b.must_not);

        Matches<Key> base;
        if (!must.empty() || !filter.empty()) {
            const auto& seed = !filter.empty() ? filter.front() : must.front();
            for (const auto& [key, _] : seed) {
                bool all = true;
                for (const auto& m : filter) all = all && m.count(key);
                for (const auto& m : must) all = all && m.count(key);
                if (!all) continue;
                Partial p;
                for (const auto& m : must) p.absorb(m.at(key));
                base.emplace(key, p);
            }
            for (const auto& m : should) {
                for (auto& [key, p] : base) {
                    if (auto it = m.find(key); it != m.end()) p.absorb(it->second);
                }
            }
        } else if (!should.empty()) {
            for (const auto& m : should) {
                for (const auto& [key, p] : m) base[key].absorb(p);
            }
        } else {
            for (const auto& key : universe()) base.emplace(key, Partial{});
        }
        for (const auto& m : must_not) {
            for (const auto& [key, _] : m) base.erase(key);
        }
        return base;
    }

    // ---- document level ----

    Matches<std::uint32_t> doc_clause(const Bool& b, const std::string& path) {
        return combine<std::uint32_t>(
            b, path, [&](const Query& q, const std::string& p) { return documents(q, p); },
            [&] {
                std::vector<std::uint32_t> all(doc_count_);
                for (std::uint32_t d = 0; d < doc_count_; ++d) all[d] = d;
                return all;
            });
    }

    Matches<std::uint32_t> doc_clause(const Match& m, const std::string&) {
        Matches<std::uint32_t> out;
        for (const auto& [doc, score] : ctx_.lexical.score_field(m.field, expand(m.text))) {
            if (doc < doc_count_) out[doc].lex = score;
        }
        return out;
    }

    Matches<std::uint32_t> doc_clause(const Term& t, const std::string&) {
        const auto role = schema_.resolve(t.field);
        auto pred = [&](const FieldValue& v) {
            if (const auto* n = std::get_if<std::int64_t>(&v)) {
                const auto* want = std::get_if<std::int64_t>(&t.value);
                return want && *want == *n;
            }
            const auto* want = std::get_if<std::string>(&t.value);
            if (!want) return false;
            auto equal = [&](const std::string& s) {
                // A date-only value matches the whole UTC day.
                if (role == FieldRole::Date && want->size() == 10) return s.compare(0, 10, *want) == 0;
                return s == *want;
            };
            if (const auto* s = std::get_if<std::string>(&v)) return equal(*s);
            const auto& list = std::get<std::vector<std::string>>(v);
            return std::any_of(list.begin(), list.end(), equal);
        };
        Matches<std::uint32_t> out;
        for (auto d : ctx_.lexical.docs_where(t.field, pred)) {
            if (d < doc_count_) out.emplace(d, Partial{});
        }
        return out;
    }

    Matches<std::uint32_t> doc_clause(const Range& r, const std::string&) {
        const bool is_date = schema_.resolve(r.field) == FieldRole::Date;
        auto bound = [&](const std::optional<Scalar>& b, bool upper) -> std::optional<Scalar> {
            if (!b || !is_date) return b;
            auto s = std::get<std::string>(*b);
            if (s.size() == 10) s += upper ? "T23:59:59Z" : "T00:00:00Z";
            return s;
        };
        const auto lo = bound(r.gte, false);
        const auto hi = bound(r.lte, true);
        auto pred = [&](const FieldValue& v) {
            if (const auto* n = std::get_if<std::int64_t>(&v)) {
                if (lo && (!std::holds_alternative<std::int64_t>(*lo) || *n < std::get<std::int64_t>(*lo))) return false;
                if (hi && (!std::holds_alternative<std::int64_t>(*hi) || *n > std::get<std::int64_t>(*hi))) return false;
                return true;
            }
            const auto* s = std::get_if<std::string>(&v);
            if (!s) return false;
            if (lo && (!std::holds_alternative<std::string>(*lo) || *s < std::get<std::string>(*lo))) return false;
            if (hi && (!std::holds_alternative<std::string>(*hi) || *s > std::get<std::string>(*hi))) return false;
            return true;
        };
        Matches<std::uint32_t> out;
        for (auto d : ctx_.lexical.docs_where(r.field, pred)) {
            if (d < doc_count_) out.emplace(d, Partial{});
        }
        return out;
    }

    Matches<std::uint32_t> doc_clause(const Nested& n, const std::string& path) {
        auto segs = segments(*n.query, path + ".nested.query");
        Matches<std::uint32_t> out;
        for (const auto& [ref, p] : segs) {
            if (ref.doc >= doc_count_) continue;
            auto& agg = out[ref.doc];
            if (p.lex && (!agg.lex || *p.lex > *agg.lex)) agg.lex = p.lex;
            if (p.sem && (!agg.sem || *p.sem > *agg.sem)) {
                agg.sem = p.sem;
                agg.best_segment = ref.ordinal;
            }
        }
        return out;
    }

    Matches<std::uint32_t> doc_clause(const Knn&, const std::string& path) {
        throw Error(ErrorCode::ValidationFailed, "knn must be nested", {{"json_path", path}});
    }

    // ---- segment level ----

    Matches<SegmentRef> segments(const Query& q, const std::string& path) {
        auto out = std::visit([&](const auto& n) { return segment_clause(n, path); }, q.node);
        record(path, q, out.size());
        return out;
    }

    Matches<SegmentRef> segment_clause(const Bool& b, const std::string& path) {
        return combine<SegmentRef>(
            b, path, [&](const Query& q, const std::string& p) { return segments(q, p); },
            [&] { return ctx_.lexical.all_segments(); });
    }

    Matches<SegmentRef> segment_clause(const Match& m, const std::string&) {
        Matches<SegmentRef> out;
        for (const auto& [ref, score] : ctx_.lexical.score_segments(expand(m.text))) out[ref].lex = score;
        return out;
    }

    Matches<SegmentRef> segment_clause(const Knn& k, const std::string&) {
        const auto query = ctx_.embedder.embed(k.query_text);
        const auto want = static_cast<std::size_t>(std::max(k.k, 1));
        const auto total = ctx_.vectors.size();

        // Widen the segment beam until it covers k distinct documents.
        std::size_t seg_k = std::max<std::size_t>(want * 4, 16);
        std::vector<KnnResult> found;
        while (true) {
            found = ctx_.vectors.knn_search(query, seg_k, std::max(seg_k, ctx_.vectors.params().ef_search));
            std::set<std::string> docs;
            for (const auto& r : found) docs.insert(r.key.doc_id);
            if (docs.size() >= want || seg_k >= total) break;
            seg_k *= 2;
        }

        // Rank documents by their best segment, keep the top k.
        std::map<std::string, double> best;
        for (const auto& r : found) {
            auto [it, inserted] = best.emplace(r.key.doc_id, r.cosine);
            if (!inserted && r.cosine > it->second) it->second = r.cosine;
        }
        std::vector<std::pair<std::string, double>> ranked(best.begin(), best.end());
        std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
            return a.second != b.second ? a.second > b.second : a.first < b.first;
        });
        if (ranked.size() > want) ranked.resize(want);
        std::set<std::string> keep;
        for (const auto& [doc, _] : ranked) keep.insert(doc);

        Matches<SegmentRef> out;
        for (const auto& r : found) {
            if (!keep.count(r.key.doc_id)) continue;
            auto doc = ctx_.lexical.doc_number(r.key.doc_id);
            if (!doc || *doc >= doc_count_) continue;
            Partial p;
            p.sem = r.cosine;
            p.best_segment = r.key.ordinal;
            out.emplace(SegmentRef{*doc, r.key.ordinal}, p);
        }
        return out;
    }

    template <typename Other>
    Matches<SegmentRef> segment_clause(const Other&, const std::string& path) {
        throw Error(ErrorCode::ValidationFailed, "clause not supported inside nested", {{"json_path", path}});
    }

    const ExecutionContext& ctx_;
    ExecutionTrace& trace_;
    const IndexSchema& schema_;
    std::uint32_t doc_count_;
};

} // namespace

ExecutionResult execute_query(const dsl::Request& request, const ExecutionContext& context) {
    const auto started = std::chrono::steady_clock::now();
    ExecutionResult result;
    result.trace.dsl = dsl::serialize(request);
    result.trace.validation = dsl::validate(request, context.lexical.schema());
    if (!result.trace.validation.ok()) {
        throw Error(ErrorCode::ValidationFailed, "query does not validate: " + result.trace.validation.summary(),
                    {{"violations", result.trace.to_json()["validation"]["violations"]}});
    }

    Evaluator evaluator(context, result.trace);
    auto matches = evaluator.documents(request.query, "$.query");
    std::stable_sort(result.trace.clauses.begin(), result.trace.clauses.end(),
                     [](const ClauseTrace& a, const ClauseTrace& b) { return a.json_path < b.json_path; });

    result.hits.reserve(matches.size());
    for (const auto& [doc, p] : matches) {
        ScoredHit hit;
        hit.doc_id = context.lexical.doc_id(doc);
        hit.lexical_score = p.lex;
        hit.semantic_score = p.sem;
        if (p.sem) hit.best_segment_ordinal = p.best_segment;
        if (!hit.lexical_score && !hit.semantic_score) hit.lexical_score = 0.0;
        result.hits.push_back(std::move(hit));
    }
    std::sort(result.hits.begin(), result.hits.end(),
              [](const ScoredHit& a, const ScoredHit& b) { return a.doc_id < b.doc_id; });

    auto fold = [](ScoreRange& r, double v) {
        r.min = r.count == 0 ? v : std::min(r.min, v);
        r.max = r.count == 0 ? v : std::max(r.max, v);
        ++r.count;
    };
    for (const auto& h : result.hits) {
        if (h.lexical_score) fold(result.trace.lexical, *h.lexical_score);
        if (h.semantic_score) fold(result.trace.semantic, *h.semantic_score);
    }
    result.trace.latency_ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - started).count();
    return result;
}

} // namespace evidex
