#include "evidex/workspace.hpp"

#include "evidex/auditor.hpp"
#include "evidex/error.hpp"

#include "detail/io.hpp"

#include <chrono>
#include <cstdio>
#include <ctime>

namespace evidex {
namespace {

using json = nlohmann::json;

std::string now_iso() {
    auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json optional_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }
json optional_json(const std::optional<int>& v) { return v ? json(*v) : json(nullptr); }
json optional_json(const std::optional<std::string>& v) { return v ? json(*v) : json(nullptr); }

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
    if (!j.contains(key) || j[key].is_null()) return std::nullopt;
    return j[key].get<T>();
}

Case case_from_json(const json& j) {
    Case c;
    c.case_id = j.at("case_id").get<std::string>();
    c.title = j.value("title", "");
    c.created_at = j.value("created_at", "");
    c.schema_version = j.value("schema_version", std::int64_t{0});
    c.corpus_ref = j.value("corpus_ref", "");
    c.index_path = j.value("index_path", "");
    c.document_count = j.value("document_count", std::size_t{0});
    return c;
}

ReviewRecord review_from_json(const json& j) {
    ReviewRecord r;
    r.case_id = j.at("case_id").get<std::string>();
    r.doc_id = j.at("doc_id").get<std::string>();
    r.status = review_status_from_string(j.at("status").get<std::string>()).value_or(ReviewStatus::Unreviewed);
    r.reviewer = j.value("reviewer", "");
    r.updated_at = j.value("updated_at", "");
    r.note = j.value("note", "");
    return r;
}

// Rethrows with the translation context merged into the error details.
[[noreturn]] void rethrow_with(const Error& e, const json& extra) {
    json details = e.details().is_object() ? e.details() : json::object();
    for (const auto& [k, v] : extra.items()) details[k] = v;
    throw Error(e.code(), e.what(), details);
}

} // namespace

std::string_view to_string(ReviewStatus status) noexcept {
    switch (status) {
    case ReviewStatus::Unreviewed: return "unreviewed";
    case ReviewStatus::Reviewed: return "reviewed";
    case ReviewStatus::Flagged: return "flagged";
    }
    return "unreviewed";
}

std::optional<ReviewStatus> review_status_from_string(std::string_view name) noexcept {
    if (name == "unreviewed") return ReviewStatus::Unreviewed;
    if (name == "reviewed") return ReviewStatus::Reviewed;
    if (name == "flagged") return ReviewStatus::Flagged;
    return std::nullopt;
}

json case_to_json(const Case& c) {
    return {{"case_id", c.case_id},       {"title", c.title},           {"created_at", c.created_at},
            {"schema_version", c.schema_version}, {"corpus_ref", c.corpus_ref}, {"index_path", c.index_path},
            {"document_count", c.document_count}};
}

json review_to_json(const ReviewRecord& r) {
    return {{"case_id", r.case_id},   {"doc_id", r.doc_id},         {"status", std::string(to_string(r.status))},
            {"reviewer", r.reviewer}, {"updated_at", r.updated_at}, {"note", r.note}};
}

json session_to_json(const QuerySession& s) {
    json corrections = json::array();
    for (const auto& c : s.corrections) corrections.push_back(correction_to_json(c));
    json results = json::array();
    for (const auto& r : s.results) {
        results.push_back({{"rank", r.rank},
                           {"doc_id", r.doc_id},
                           {"fused_score", r.fused_score},
                           {"norm_lexical", r.norm_lexical},
                           {"norm_semantic", r.norm_semantic},
                           {"lexical_score", optional_json(r.lexical_score)},
                           {"semantic_score", optional_json(r.semantic_score)},
                           {"best_segment_ordinal", optional_json(r.best_segment_ordinal)}});
    }
    return {{"session_id", s.session_id},
            {"case_id", s.case_id},
            {"parent_session_id", optional_json(s.parent_session_id)},
            {"created_at", s.created_at},
            {"nl_query", optional_json(s.nl_query)},
            {"translation",
             {{"translator_kind", std::string(to_string(s.translator_kind))},
              {"reasoning", s.reasoning},
              {"pre_audit_query", s.pre_audit_query ? *s.pre_audit_query : json(nullptr)},
              {"corrections", corrections}}},
            {"request", s.request},
            {"dsl", s.request.dump()},
            {"fusion", fusion_to_json(s.fusion)},
            {"snapshot", {{"documents", s.snapshot_documents}, {"segments", s.snapshot_segments}}},
            {"results", results},
            {"total_results", s.results.size()},
            {"trace", s.trace}};
}

QuerySession session_from_json(const json& j) {
    QuerySession s;
    s.session_id = j.at("session_id").get<std::string>();
    s.case_id = j.at("case_id").get<std::string>();
    s.parent_session_id = optional_from<std::string>(j, "parent_session_id");
    s.created_at = j.value("created_at", "");
    s.nl_query = optional_from<std::string>(j, "nl_query");
    const auto& t = j.at("translation");
    s.translator_kind = translator_kind_from_string(t.value("translator_kind", "manual")).value_or(TranslatorKind::Manual);
    s.reasoning = t.value("reasoning", "");
    if (t.contains("pre_audit_query") && !t["pre_audit_query"].is_null()) s.pre_audit_query = t["pre_audit_query"];
    for (const auto& c : t.value("corrections", json::array())) s.corrections.push_back(correction_from_json(c));
    s.request = j.at("request");
    s.fusion = fusion_from_json(j.at("fusion"));
    s.snapshot_documents = j.at("snapshot").value("documents", std::size_t{0});
    s.snapshot_segments = j.at("snapshot").value("segments", std::size_t{0});
    for (const auto& r : j.at("results")) {
        SessionResult out;
        out.rank = r.at("rank").get<int>();
        out.doc_id = r.at("doc_id").get<std::string>();
        out.fused_score = r.at("fused_score").get<double>();
        out.norm_lexical = r.value("norm_lexical", 0.0);
        out.norm_semantic = r.value("norm_semantic", 0.0);
        out.lexical_score = optional_from<double>(r, "lexical_score");
        out.semantic_score = optional_from<double>(r, "semantic_score");
        out.best_segment_ordinal = optional_from<int>(r, "best_segment_ordinal");
        s.results.push_back(std::move(out));
    }
    s.trace = j.value("trace", json::object());
    return s;
}

json coverage_to_json(const CoverageReport& r) {
    json sessions = json::array();
    for (const auto& s : r.sessions) {
        sessions.push_back(
            {{"session_id", s.session_id}, {"retrieved", s.retrieved}, {"reviewed", s.reviewed}, {"flagged", s.flagged}});
    }
    return {{"case_id", r.case_id},
            {"total_docs", r.total_docs},
            {"reviewed", r.reviewed},
            {"flagged", r.flagged},
            {"unreviewed", r.total_docs - std::min(r.total_docs, r.reviewed + r.flagged)},
            {"sessions", sessions}};
}

Workspace::Workspace(std::filesystem::path root, WorkspaceOptions options)
    : root_(std::move(root)), options_(std::move(options)), embedder_(make_embedder(options_.embedder)),
      rule_based_(std::make_unique<RuleBasedTranslator>()) {
    if (!options_.translator.remote.url.empty())
        remote_ = std::make_unique<RemoteTranslator>(options_.translator.remote);
    std::filesystem::create_directories(root_);
    replay_journals();
    auto open = [&](std::ofstream& out, const char* name) {
        out.open(root_ / name, std::ios::app | std::ios::binary);
        if (!out) throw Error(ErrorCode::Io, "cannot open journal", {{"path", (root_ / name).string()}});
    };
    open(cases_out_, "cases.jsonl");
    open(sessions_out_, "sessions.jsonl");
    open(reviews_out_, "reviews.jsonl");
}

void Workspace::replay_journals() {
    auto replay = [&](const char* name, const std::function<void(const json&)>& apply) {
        auto path = root_ / name;
        if (!std::filesystem::exists(path)) return;
        detail::for_each_line(path, [&](const std::string& line) {
            if (line.empty()) return;
            auto j = json::parse(line, nullptr, false);
            if (j.is_discarded()) return;  // torn final append
            apply(j);
        });
    };
    replay("cases.jsonl", [&](const json& j) {
        auto op = j.value("op", "create");
        if (op == "create") {
            auto c = case_from_json(j.at("case"));
            if (!cases_.contains(c.case_id)) case_order_.push_back(c.case_id);
            cases_[c.case_id] = c;
        } else if (op == "update" || op == "rename") {
            auto it = cases_.find(j.at("case_id").get<std::string>());
            if (it == cases_.end()) return;
            if (j.contains("title")) it->second.title = j["title"].get<std::string>();
            if (j.contains("document_count")) it->second.document_count = j["document_count"].get<std::size_t>();
            if (j.contains("schema_version")) it->second.schema_version = j["schema_version"].get<std::int64_t>();
        }
    });
    replay("sessions.jsonl", [&](const json& j) {
        auto s = session_from_json(j);
        ++session_seq_;
        sessions_[s.case_id].push_back(std::move(s));
    });
    replay("reviews.jsonl", [&](const json& j) {
        auto r = review_from_json(j);
        reviews_[r.case_id][r.doc_id] = r;
    });
}

void Workspace::append(std::ofstream& out, const std::filesystem::path& path, const json& entry) {
    out << entry.dump() << '\n';
    out.flush();
    if (!out) throw Error(ErrorCode::Io, "cannot append to journal", {{"path", path.string()}});
}

std::string Workspace::next_id(const char* prefix, std::size_t n) const {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%s%06zu", prefix, n);
    return buf;
}

std::shared_ptr<SearchEngine> Workspace::load_or_create_engine(const Case& c) const {
    std::lock_guard lock(engines_mutex_);
    if (auto it = engines_.find(c.case_id); it != engines_.end()) return it->second;
    auto dir = root_ / c.index_path;
    std::shared_ptr<SearchEngine> engine;
    if (std::filesystem::exists(dir / "manifest.json")) engine = SearchEngine::load(dir, embedder_, options_.synonyms);
    else engine = std::make_shared<SearchEngine>(maildir_schema(), embedder_, options_.synonyms);
    engines_[c.case_id] = engine;
    return engine;
}

std::shared_ptr<const SearchEngine> Workspace::engine(const std::string& case_id) const {
    return load_or_create_engine(get_case(case_id));
}

const Translator& Workspace::translator(TranslatorKind kind) const {
    if (kind == TranslatorKind::Remote) {
        if (!remote_)
            throw Error(ErrorCode::TranslatorUnavailable, "no remote translator is configured (translator.url)");
        return *remote_;
    }
    return *rule_based_;
}

Case Workspace::create_case(const std::string& title, const std::string& corpus_dir) {
    std::error_code ec;
    if (!std::filesystem::is_directory(corpus_dir, ec))
        throw Error(ErrorCode::NotFound, "corpus directory not found", {{"corpus_ref", corpus_dir}});
    std::string id;
    {
        std::lock_guard writer(writer_mutex_);
        std::unique_lock state(state_mutex_);
        std::size_t n = cases_.size() + 1;
        do {
            id = next_id("case-", n++);
        } while (cases_.contains(id));
        Case c;
        c.case_id = id;
        c.title = title;
        c.created_at = now_iso();
        c.corpus_ref = corpus_dir;
        c.index_path = "indexes/" + id;
        c.schema_version = maildir_schema().version;
        append(cases_out_, root_ / "cases.jsonl", {{"op", "create"}, {"case", case_to_json(c)}});
        cases_[id] = c;
        case_order_.push_back(id);
    }
    return ingest_case(id, corpus_dir, options_.chunk_profile, options_.ingest_workers).first;
}

std::pair<Case, IngestReport> Workspace::ingest_case(const std::string& case_id, const std::string& corpus_dir,
                                                     const ChunkProfile& profile, int workers) {
    std::lock_guard ingest(ingest_mutex_);
    if (!find_case(case_id)) {
        std::lock_guard writer(writer_mutex_);
        std::unique_lock state(state_mutex_);
        Case c;
        c.case_id = case_id;
        c.title = case_id;
        c.created_at = now_iso();
        c.corpus_ref = corpus_dir;
        c.index_path = "indexes/" + case_id;
        c.schema_version = maildir_schema().version;
        append(cases_out_, root_ / "cases.jsonl", {{"op", "create"}, {"case", case_to_json(c)}});
        cases_[case_id] = c;
        case_order_.push_back(case_id);
    }
    auto c = get_case(case_id);
    auto engine = load_or_create_engine(c);
    auto report = ingest_corpus(corpus_dir, *engine, root_ / "queues" / (case_id + ".jsonl"), profile, workers);
    engine->save(root_ / c.index_path);

    std::lock_guard writer(writer_mutex_);
    std::unique_lock state(state_mutex_);
    auto& stored = cases_.at(case_id);
    stored.document_count = engine->doc_count();
    stored.schema_version = engine->schema().version;
    append(cases_out_, root_ / "cases.jsonl",
           {{"op", "update"},
            {"case_id", case_id},
            {"document_count", stored.document_count},
            {"schema_version", stored.schema_version}});
    return {stored, report};
}

Case Workspace::rename_case(const std::string& case_id, const std::string& title) {
    std::lock_guard writer(writer_mutex_);
    std::unique_lock state(state_mutex_);
    auto it = cases_.find(case_id);
    if (it == cases_.end()) throw Error(ErrorCode::NotFound, "unknown case", {{"case_id", case_id}});
    append(cases_out_, root_ / "cases.jsonl", {{"op", "rename"}, {"case_id", case_id}, {"title", title}});
    it->second.title = title;
    return it->second;
}

std::optional<Case> Workspace::find_case(const std::string& case_id) const {
    std::shared_lock state(state_mutex_);
    auto it = cases_.find(case_id);
    if (it == cases_.end()) return std::nullopt;
    return it->second;
}

Case Workspace::get_case(const std::string& case_id) const {
    auto c = find_case(case_id);
    if (!c) throw Error(ErrorCode::NotFound, "unknown case", {{"case_id", case_id}});
    return *c;
}

std::vector<Case> Workspace::cases() const {
    std::shared_lock state(state_mutex_);
    std::vector<Case> out;
    for (const auto& id : case_order_) out.push_back(cases_.at(id));
    return out;
}

QuerySession Workspace::submit_nl_query(const std::string& case_id, const std::string& nl_query,
                                        const std::optional<FusionConfig>& fusion,
                                        std::optional<TranslatorKind> translator_kind,
                                        const std::optional<std::string>& parent_session_id) {
    auto eng = engine(case_id);
    auto kind = translator_kind.value_or(options_.translator.kind);
    if (kind == TranslatorKind::Manual)
        throw Error(ErrorCode::InvalidArgument, "manual queries are submitted as dsl, not nl_query");
    TranslationRequest tr{nl_query, eng->schema(), case_id};

    TranslationResult translation;
    try {
        translation = translator(kind).translate(tr);
    } catch (const Error& e) {
        rethrow_with(e, {{"translator_kind", std::string(to_string(kind))}, {"nl_query", nl_query}});
    }
    AuditResult audited;
    try {
        audited = audit_query(translation.query, eng->schema(), nl_query);
    } catch (const Error& e) {
        rethrow_with(e, {{"translator_kind", std::string(to_string(kind))},
                         {"nl_query", nl_query},
                         {"reasoning", translation.reasoning},
                         {"pre_audit_query", dsl::to_json(translation.query)}});
    }

    QuerySession session;
    session.case_id = case_id;
    session.parent_session_id = parent_session_id;
    session.nl_query = nl_query;
    session.translator_kind = kind;
    session.reasoning = translation.reasoning;
    session.pre_audit_query = dsl::to_json(translation.query);
    session.corrections = translation.corrections;
    session.corrections.insert(session.corrections.end(), audited.corrections.begin(), audited.corrections.end());

    dsl::Request request;
    request.query = audited.query;
    return run_session(case_id, std::move(session), request, fusion);
}

QuerySession Workspace::submit_dsl_query(const std::string& case_id, const json& dsl,
                                         const std::optional<FusionConfig>& fusion,
                                         const std::optional<std::string>& parent_session_id) {
    auto eng = engine(case_id);
    auto request = dsl::parse_request(dsl);
    auto report = dsl::validate(request, eng->schema());
    if (!report.ok()) {
        json violations = json::array();
        for (const auto& v : report.violations) violations.push_back({{"json_path", v.field}, {"message", v.message}});
        throw Error(ErrorCode::ValidationFailed, "query does not validate: " + report.summary(),
                    {{"violations", violations}, {"json_path", report.violations.front().field}});
    }
    QuerySession session;
    session.case_id = case_id;
    session.parent_session_id = parent_session_id;
    session.translator_kind = TranslatorKind::Manual;
    return run_session(case_id, std::move(session), request, fusion);
}

QuerySession Workspace::run_session(const std::string& case_id, QuerySession session, const dsl::Request& request,
                                    const std::optional<FusionConfig>& fusion) {
    if (session.parent_session_id && !this->session(case_id, *session.parent_session_id))
        throw Error(ErrorCode::NotFound, "unknown parent session", {{"parent_session_id", *session.parent_session_id}});
    auto eng = engine(case_id);
    dsl::Request executed = request;
    executed.fusion = fusion ? *fusion : request.fusion.value_or(options_.fusion);
    validate_fusion(*executed.fusion);

    auto response = eng->search(executed);
    session.request = dsl::to_json(executed);
    session.fusion = response.fusion;
    session.trace = response.execution.trace.to_json();
    session.snapshot_documents = eng->doc_count();
    session.snapshot_segments = eng->segment_count();
    for (const auto& r : response.ranked) {
        session.results.push_back({r.rank, r.doc_id, r.fused_score, r.norm_lexical, r.norm_semantic, r.lexical_score,
                                   r.semantic_score, r.best_segment_ordinal});
    }

    std::lock_guard writer(writer_mutex_);
    std::unique_lock state(state_mutex_);
    session.session_id = next_id("s-", ++session_seq_);
    session.created_at = now_iso();
    append(sessions_out_, root_ / "sessions.jsonl", session_to_json(session));
    sessions_[case_id].push_back(session);
    return session;
}

std::optional<QuerySession> Workspace::session(const std::string& case_id, const std::string& session_id) const {
    std::shared_lock state(state_mutex_);
    auto it = sessions_.find(case_id);
    if (it == sessions_.end()) return std::nullopt;
    for (const auto& s : it->second)
        if (s.session_id == session_id) return s;
    return std::nullopt;
}

std::vector<QuerySession> Workspace::sessions(const std::string& case_id) const {
    std::shared_lock state(state_mutex_);
    auto it = sessions_.find(case_id);
    return it == sessions_.end() ? std::vector<QuerySession>{} : it->second;
}

std::vector<std::string> Workspace::replay_session(const std::string& case_id, const std::string& session_id) const {
    auto s = session(case_id, session_id);
    if (!s) throw Error(ErrorCode::NotFound, "unknown session", {{"case_id", case_id}, {"session_id", session_id}});
    auto response = engine(case_id)->search(dsl::parse_request(s->request));
    std::vector<std::string> ids;
    ids.reserve(response.ranked.size());
    for (const auto& r : response.ranked) ids.push_back(r.doc_id);
    return ids;
}

ReviewRecord Workspace::set_review(const std::string& case_id, const std::string& doc_id, ReviewStatus status,
                                   const std::string& note, const std::string& reviewer) {
    auto eng = engine(case_id);
    if (!eng->contains(doc_id))
        throw Error(ErrorCode::NotFound, "unknown document", {{"case_id", case_id}, {"doc_id", doc_id}});
    ReviewRecord r{case_id, doc_id, status, reviewer, now_iso(), note};
    std::lock_guard writer(writer_mutex_);
    std::unique_lock state(state_mutex_);
    append(reviews_out_, root_ / "reviews.jsonl", review_to_json(r));
    reviews_[case_id][doc_id] = r;
    return r;
}

ReviewRecord Workspace::review(const std::string& case_id, const std::string& doc_id) const {
    std::shared_lock state(state_mutex_);
    if (auto c = reviews_.find(case_id); c != reviews_.end()) {
        if (auto it = c->second.find(doc_id); it != c->second.end()) return it->second;
    }
    ReviewRecord r;
    r.case_id = case_id;
    r.doc_id = doc_id;
    return r;
}

std::vector<ReviewRecord> Workspace::reviews(const std::string& case_id) const {
    std::shared_lock state(state_mutex_);
    std::vector<ReviewRecord> out;
    if (auto c = reviews_.find(case_id); c != reviews_.end())
        for (const auto& [id, r] : c->second) out.push_back(r);
    return out;
}

CoverageReport Workspace::coverage(const std::string& case_id) const {
    auto eng = engine(case_id);
    CoverageReport report;
    report.case_id = case_id;
    report.total_docs = eng->doc_count();
    std::shared_lock state(state_mutex_);
    const std::map<std::string, ReviewRecord> empty;
    auto rit = reviews_.find(case_id);
    const auto& records = rit == reviews_.end() ? empty : rit->second;
    for (const auto& [id, r] : records) {
        if (r.status == ReviewStatus::Reviewed) ++report.reviewed;
        if (r.status == ReviewStatus::Flagged) ++report.flagged;
    }
    if (auto sit = sessions_.find(case_id); sit != sessions_.end()) {
        for (const auto& s : sit->second) {
            SessionCoverage sc;
            sc.session_id = s.session_id;
            sc.retrieved = s.results.size();
            for (const auto& r : s.results) {
                auto it = records.find(r.doc_id);
                if (it == records.end()) continue;
                if (it->second.status == ReviewStatus::Reviewed) ++sc.reviewed;
                if (it->second.status == ReviewStatus::Flagged) ++sc.flagged;
            }
            report.sessions.push_back(sc);
        }
    }
    return report;
}

std::optional<Document> Workspace::document(const std::string& case_id, const std::string& doc_id) const {
    return engine(case_id)->document(doc_id);
}

} // namespace evidex
