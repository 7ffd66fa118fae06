#include "evidex/lexical_index.hpp"

#include "evidex/error.hpp"
#include "evidex/text_analysis.hpp"
#include "detail/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>

namespace evidex {

double bm25_idf(std::uint64_t doc_count, std::uint64_t doc_freq) noexcept {
    const double n = static_cast<double>(doc_count);
    const double df = static_cast<double>(doc_freq);
    return std::log(1.0 + (n - df + 0.5) / (df + 0.5));
}

double bm25_weight(double idf, std::uint32_t tf, std::uint32_t field_len, double avg_len, const Bm25Params& p) noexcept {
    if (tf == 0) return 0.0;
    const double f = static_cast<double>(tf);
    const double norm = avg_len > 0.0 ? static_cast<double>(field_len) / avg_len : 0.0;
    return idf * f * (p.k1 + 1.0) / (f + p.k1 * (1.0 - p.b + p.b * norm));
}

LexicalIndex::LexicalIndex(IndexSchema schema, Bm25Params params)
    : schema_(std::move(schema)), params_(params), segment_field_(schema_.segment_text_path()) {
    for (const auto& [name, type] : schema_.fields) {
        if (type == FieldType::Text) fields_[name];
    }
    if (schema_.nested_field()) fields_[segment_field_];
}

bool LexicalIndex::is_text_field(const std::string& field) const { return fields_.count(field) > 0; }

const LexicalIndex::FieldPostings* LexicalIndex::field_postings(const std::string& field) const {
    auto it = fields_.find(field);
    if (it == fields_.end()) {
        throw Error(ErrorCode::UnknownField, "'" + field + "' is not a text field of schema '" + schema_.name + "'",
                    {{"field", field}});
    }
    return &it->second;
}

void LexicalIndex::add_text(FieldPostings& fp, std::uint32_t unit, std::string_view text) {
    auto tokens = tokenize(text);
    if (fp.lengths.size() <= unit) fp.lengths.resize(unit + 1, 0);
    fp.lengths[unit] = static_cast<std::uint32_t>(tokens.size());
    fp.stats.doc_count += 1;
    fp.stats.total_tokens += tokens.size();
    std::map<std::string, std::vector<std::uint32_t>> positions;
    for (auto& t : tokens) positions[t.term].push_back(static_cast<std::uint32_t>(t.position));
    for (auto& [term, pos] : positions) fp.postings[term].push_back({unit, std::move(pos)});
}

void LexicalIndex::index_document(const Document& doc) {
    auto report = validate_document(doc, schema_);
    if (!report.ok()) {
        throw Error(ErrorCode::SchemaMismatch, "document '" + doc.doc_id + "' rejected: " + report.summary(),
                    {{"doc_id", doc.doc_id}});
    }

    std::unique_lock lock(mutex_);
    if (numbers_.count(doc.doc_id)) {
        throw Error(ErrorCode::DuplicateDocument, "document '" + doc.doc_id + "' already indexed", {{"doc_id", doc.doc_id}});
    }
    const auto doc_no = static_cast<std::uint32_t>(ids_.size());

    std::map<std::string, FieldValue> stored;
    for (const auto& [name, value] : doc.fields) {
        if (schema_.type_of(name) == FieldType::Text) add_text(fields_.at(name), doc_no, std::get<std::string>(value));
        else stored.emplace(name, value);
    }
    for (auto& [name, fp] : fields_) {
        if (name != segment_field_ && fp.lengths.size() <= doc_no) fp.lengths.resize(doc_no + 1, 0);
    }
    std::vector<std::uint32_t> units;
    for (const auto& seg : doc.segments) {
        const auto unit = static_cast<std::uint32_t>(segment_units_.size());
        add_text(fields_.at(segment_field_), unit, seg.text);
        segment_units_.push_back({doc_no, seg.ordinal});
        units.push_back(unit);
    }

    ids_.push_back(doc.doc_id);
    numbers_.emplace(doc.doc_id, doc_no);
    stored_.push_back(std::move(stored));
    doc_segments_.push_back(std::move(units));
}

std::size_t LexicalIndex::doc_count() const {
    std::shared_lock lock(mutex_);
    return ids_.size();
}

std::size_t LexicalIndex::segment_count() const {
    std::shared_lock lock(mutex_);
    return segment_units_.size();
}

bool LexicalIndex::contains(const std::string& doc_id) const {
    std::shared_lock lock(mutex_);
    return numbers_.count(doc_id) > 0;
}

std::optional<std::uint32_t> LexicalIndex::doc_number(const std::string& doc_id) const {
    std::shared_lock lock(mutex_);
    auto it = numbers_.find(doc_id);
    if (it == numbers_.end()) return std::nullopt;
    return it->second;
}

std::string LexicalIndex::doc_id(std::uint32_t doc_no) const {
    std::shared_lock lock(mutex_);
    return ids_.at(doc_no);
}

std::map<std::string, FieldValue> LexicalIndex::stored_fields(std::uint32_t doc_no) const {
    std::shared_lock lock(mutex_);
    return stored_.at(doc_no);
}

std::vector<SegmentRef> LexicalIndex::segments_of(std::uint32_t doc_no) const {
    std::shared_lock lock(mutex_);
    std::vector<SegmentRef> out;
    for (auto unit : doc_segments_.at(doc_no)) out.push_back(segment_units_[unit]);
    return out;
}

std::vector<std::uint32_t> LexicalIndex::docs_where(const std::string& field,
                                                   const std::function<bool(const FieldValue&)>& pred) const {
    std::shared_lock lock(mutex_);
    std::vector<std::uint32_t> out;
    for (std::uint32_t d = 0; d < stored_.size(); ++d) {
        auto it = stored_[d].find(field);
        if (it != stored_[d].end() && pred(it->second)) out.push_back(d);
    }
    return out;
}

std::vector<SegmentRef> LexicalIndex::all_segments() const {
    std::shared_lock lock(mutex_);
    return segment_units_;
}

FieldStats LexicalIndex::stats(const std::string& field) const {
    std::shared_lock lock(mutex_);
    return field_postings(field)->stats;
}

std::uint64_t LexicalIndex::document_frequency(const std::string& term, const std::string& field) const {
    std::shared_lock lock(mutex_);
    const auto* fp = field_postings(field);
    auto it = fp->postings.find(term);
    return it == fp->postings.end() ? 0 : it->second.size();
}

std::uint32_t LexicalIndex::term_frequency(const std::string& term, const std::string& field,
                                           const std::string& doc_id) const {
    std::shared_lock lock(mutex_);
    const auto* fp = field_postings(field);
    auto num = numbers_.find(doc_id);
    auto it = fp->postings.find(term);
    if (num == numbers_.end() || it == fp->postings.end()) return 0;
    const auto& list = it->second;
    auto pos = std::lower_bound(list.begin(), list.end(), num->second,
                                [](const Posting& p, std::uint32_t unit) { return p.unit < unit; });
    return (pos != list.end() && pos->unit == num->second) ? pos->tf() : 0;
}

double LexicalIndex::bm25_term_score(const std::string& term, const std::string& field, const std::string& doc_id) const {
    std::shared_lock lock(mutex_);
    const auto* fp = field_postings(field);
    if (field == segment_field_) {
        throw Error(ErrorCode::UnknownField, "segment text is scored per segment, not per document", {{"field", field}});
    }
    auto num = numbers_.find(doc_id);
    auto it = fp->postings.find(term);
    if (num == numbers_.end() || it == fp->postings.end()) return 0.0;
    const auto& list = it->second;
    auto pos = std::lower_bound(list.begin(), list.end(), num->second,
                                [](const Posting& p, std::uint32_t unit) { return p.unit < unit; });
    if (pos == list.end() || pos->unit != num->second) return 0.0;
    const double idf = bm25_idf(fp->stats.doc_count, list.size());
    return bm25_weight(idf, pos->tf(), fp->lengths[pos->unit], fp->stats.avg_field_length(), params_);
}

template <typename Fn>
void LexicalIndex::score_terms(const FieldPostings& fp, const std::vector<std::set<std::string>>& terms, Fn&& emit) const {
    const double avg = fp.stats.avg_field_length();
    for (const auto& alternatives : terms) {
        // max over the synonym set, per unit
        std::unordered_map<std::uint32_t, double> best;
        for (const auto& term : alternatives) {
            auto it = fp.postings.find(term);
            if (it == fp.postings.end()) continue;
            const double idf = bm25_idf(fp.stats.doc_count, it->second.size());
            for (const auto& p : it->second) {
                double w = bm25_weight(idf, p.tf(), fp.lengths[p.unit], avg, params_);
                auto [slot, inserted] = best.emplace(p.unit, w);
                if (!inserted && w > slot->second) slot->second = w;
            }
        }
        for (const auto& [unit, w] : best) emit(unit, w);
    }
}

std::unordered_map<std::uint32_t, double> LexicalIndex::score_field(const std::string& field,
                                                                    const std::vector<std::set<std::string>>& terms) const {
    std::shared_lock lock(mutex_);
    if (field == segment_field_) {
        throw Error(ErrorCode::UnknownField, "segment text is scored per segment, not per document", {{"field", field}});
    }
    const auto* fp = field_postings(field);
    std::unordered_map<std::uint32_t, double> scores;
    score_terms(*fp, terms, [&](std::uint32_t unit, double w) { scores[unit] += w; });
    return scores;
}

std::map<SegmentRef, double> LexicalIndex::score_segments(const std::vector<std::set<std::string>>& terms) const {
    std::shared_lock lock(mutex_);
    const auto* fp = field_postings(segment_field_);
    std::map<SegmentRef, double> scores;
    score_terms(*fp, terms, [&](std::uint32_t unit, double w) { scores[segment_units_[unit]] += w; });
    return scores;
}

std::vector<ScoredHit> LexicalIndex::search_lexical(const std::vector<QueryTerm>& terms, int k) const {
    if (k <= 0) return {};
    // Group terms by field so each field's scoring runs once.
    std::map<std::string, std::vector<std::set<std::string>>> by_field;
    for (const auto& qt : terms) by_field[qt.field].push_back(qt.alternatives);

    std::unordered_map<std::uint32_t, double> totals;
    for (const auto& [field, sets] : by_field) {
        for (const auto& [unit, score] : score_field(field, sets)) totals[unit] += score;
    }

    std::shared_lock lock(mutex_);
    std::vector<ScoredHit> hits;
    hits.reserve(totals.size());
    for (const auto& [unit, score] : totals) {
        ScoredHit hit;
        hit.doc_id = ids_[unit];
        hit.lexical_score = score;
        hits.push_back(std::move(hit));
    }
    auto order = [](const ScoredHit& a, const ScoredHit& b) {
        if (*a.lexical_score != *b.lexical_score) return *a.lexical_score > *b.lexical_score;
        return a.doc_id < b.doc_id;
    };
    const auto limit = std::min<std::size_t>(static_cast<std::size_t>(k), hits.size());
    std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(limit), hits.end(), order);
    hits.resize(limit);
    return hits;
}

std::uint64_t LexicalIndex::posting_bytes() const {
    std::shared_lock lock(mutex_);
    std::uint64_t bytes = 0;
    for (const auto& [name, fp] : fields_) {
        for (const auto& [term, list] : fp.postings) {
            bytes += term.size() + sizeof(std::uint32_t);
            for (const auto& p : list) bytes += 2 * sizeof(std::uint32_t) + p.positions.size() * sizeof(std::uint32_t);
        }
    }
    return bytes;
}

nlohmann::json LexicalIndex::manifest() const {
    nlohmann::json fields = nlohmann::json::object();
    const auto bytes = posting_bytes();
    std::shared_lock lock(mutex_);
    for (const auto& [name, fp] : fields_) {
        fields[name] = {{"doc_count", fp.stats.doc_count},
                        {"total_tokens", fp.stats.total_tokens},
                        {"terms", fp.postings.size()}};
    }
    return {{"format_version", kFormatVersion},
            {"schema", schema_to_json(schema_)},
            {"schema_version", schema_.version},
            {"doc_count", ids_.size()},
            {"segment_count", segment_units_.size()},
            {"posting_bytes", bytes},
            {"bm25", {{"k1", params_.k1}, {"b", params_.b}}},
            {"fields", fields}};
}

void LexicalIndex::save(const std::filesystem::path& dir) const {
    std::filesystem::create_directories(dir);
    detail::write_file_atomic(dir / "manifest.json", manifest().dump(2) + "\n");

    std::shared_lock lock(mutex_);
    std::string docs;
    for (std::uint32_t d = 0; d < ids_.size(); ++d) {
        nlohmann::json stored = nlohmann::json::object();
        for (const auto& [name, value] : stored_[d]) std::visit([&](const auto& v) { stored[name] = v; }, value);
        nlohmann::json lengths = nlohmann::json::object();
        for (const auto& [name, fp] : fields_) {
            if (name != segment_field_) lengths[name] = fp.lengths[d];
        }
        nlohmann::json segs = nlohmann::json::array();
        for (auto unit : doc_segments_[d]) {
            segs.push_back({segment_units_[unit].ordinal, fields_.at(segment_field_).lengths[unit]});
        }
        docs += nlohmann::json{{"doc_id", ids_[d]}, {"stored", stored}, {"lengths", lengths}, {"segments", segs}}.dump();
        docs += '\n';
    }
    detail::write_file_atomic(dir / "documents.jsonl", docs);

    std::string postings;
    for (const auto& [name, fp] : fields_) {
        std::vector<const std::string*> terms;
        for (const auto& [term, list] : fp.postings) terms.push_back(&term);
        std::sort(terms.begin(), terms.end(), [](auto* a, auto* b) { return *a < *b; });
        for (const auto* term : terms) {
            nlohmann::json list = nlohmann::json::array();
            for (const auto& p : fp.postings.at(*term)) list.push_back({p.unit, p.positions});
            postings += nlohmann::json{{"field", name}, {"term", *term}, {"postings", list}}.dump();
            postings += '\n';
        }
    }
    detail::write_file_atomic(dir / "postings.jsonl", postings);
}

std::unique_ptr<LexicalIndex> LexicalIndex::load(const std::filesystem::path& dir) {
    auto manifest = nlohmann::json::parse(detail::read_file(dir / "manifest.json"));
    if (manifest.value("format_version", 0) != kFormatVersion) {
        throw Error(ErrorCode::FormatMismatch,
                    "lexical index format " + std::to_string(manifest.value("format_version", 0)) +
                        " does not match supported format " + std::to_string(kFormatVersion));
    }
    Bm25Params params{manifest.at("bm25").at("k1").get<double>(), manifest.at("bm25").at("b").get<double>()};
    auto index = std::make_unique<LexicalIndex>(schema_from_json(manifest.at("schema")), params);
    auto& self = *index;

    detail::for_each_line(dir / "documents.jsonl", [&](const std::string& line) {
        auto j = nlohmann::json::parse(line);
        const auto doc_no = static_cast<std::uint32_t>(self.ids_.size());
        self.ids_.push_back(j.at("doc_id").get<std::string>());
        self.numbers_.emplace(self.ids_.back(), doc_no);
        std::map<std::string, FieldValue> stored;
        for (const auto& [name, value] : j.at("stored").items()) {
            if (value.is_string()) stored[name] = value.get<std::string>();
            else if (value.is_number_integer()) stored[name] = value.get<std::int64_t>();
            else stored[name] = value.get<std::vector<std::string>>();
        }
        self.stored_.push_back(std::move(stored));
        for (const auto& [name, len] : j.at("lengths").items()) {
            auto& fp = self.fields_.at(name);
            fp.lengths.push_back(len.get<std::uint32_t>());
        }
        std::vector<std::uint32_t> units;
        for (const auto& s : j.at("segments")) {
            const auto unit = static_cast<std::uint32_t>(self.segment_units_.size());
            self.segment_units_.push_back({doc_no, s.at(0).get<int>()});
            self.fields_.at(self.segment_field_).lengths.push_back(s.at(1).get<std::uint32_t>());
            units.push_back(unit);
        }
        self.doc_segments_.push_back(std::move(units));
    });

    for (const auto& [name, stats] : manifest.at("fields").items()) {
        auto& fp = self.fields_.at(name);
        fp.stats.doc_count = stats.at("doc_count").get<std::uint64_t>();
        fp.stats.total_tokens = stats.at("total_tokens").get<std::uint64_t>();
    }
    detail::for_each_line(dir / "postings.jsonl", [&](const std::string& line) {
        auto j = nlohmann::json::parse(line);
        auto& list = self.fields_.at(j.at("field").get<std::string>()).postings[j.at("term").get<std::string>()];
        for (const auto& p : j.at("postings")) {
            list.push_back({p.at(0).get<std::uint32_t>(), p.at(1).get<std::vector<std::uint32_t>>()});
        }
    });
    if (self.ids_.size() != manifest.at("doc_count").get<std::size_t>()) {
        throw Error(ErrorCode::FormatMismatch, "lexical index document count does not match manifest");
    }
    return index;
}

} // namespace evidex
