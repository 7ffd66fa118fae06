#include "evidex/translation.hpp"

#include "evidex/error.hpp"
#include "evidex/text_analysis.hpp"

#include "detail/http.hpp"
#include "detail/resources.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <regex>

namespace evidex {
namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string strip_punct(std::string_view w) {
    auto edge = [](char c) { return c == ',' || c == ';' || c == '.' || c == '!' || c == '?' || c == ')' || c == '('; };
    while (!w.empty() && edge(w.back())) w.remove_suffix(1);
    while (!w.empty() && edge(w.front())) w.remove_prefix(1);
    return std::string(w);
}

bool starts_with_ci(std::string_view s, std::string_view prefix) {
    return s.size() >= prefix.size() &&
           std::equal(prefix.begin(), prefix.end(), s.begin(),
                      [](char a, char b) { return std::tolower(static_cast<unsigned char>(a)) == b; });
}

const std::regex& email_re() {
    static const std::regex re(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9.-]+\.[A-Za-z]{2,})");
    return re;
}

bool is_capitalized(const std::string& w) {
    static const std::regex re(R"([A-Z][a-z]+)");
    return std::regex_match(w, re);
}

struct Item {
    bool phrase = false;
    std::string text;
};

std::vector<Item> split_items(std::string_view nl) {
    std::vector<Item> items;
    std::size_t i = 0;
    while (i < nl.size()) {
        if (std::isspace(static_cast<unsigned char>(nl[i]))) {
            ++i;
            continue;
        }
        if (nl[i] == '"') {
            auto close = nl.find('"', i + 1);
            auto end = close == std::string_view::npos ? nl.size() : close;
            items.push_back({true, std::string(nl.substr(i + 1, end - i - 1))});
            i = close == std::string_view::npos ? nl.size() : close + 1;
            continue;
        }
        auto s = i;
        while (i < nl.size() && !std::isspace(static_cast<unsigned char>(nl[i])) && nl[i] != '"') ++i;
        items.push_back({false, std::string(nl.substr(s, i - s))});
    }
    return items;
}

std::string fill_template(std::string_view tpl, const std::map<std::string, std::string>& values) {
    std::string out;
    std::size_t i = 0;
    while (i < tpl.size()) {
        auto open = tpl.find("{{", i);
        if (open == std::string_view::npos) break;
        auto close = tpl.find("}}", open + 2);
        if (close == std::string_view::npos) break;
        auto it = values.find(std::string(tpl.substr(open + 2, close - open - 2)));
        out.append(tpl.substr(i, open - i));
        if (it != values.end()) out += it->second;
        else out.append(tpl.substr(open, close + 2 - open));
        i = close + 2;
    }
    out.append(tpl.substr(i));
    return out;
}

} // namespace

std::string_view to_string(TranslatorKind kind) noexcept {
    switch (kind) {
    case TranslatorKind::Remote: return "remote";
    case TranslatorKind::RuleBased: return "rule_based";
    case TranslatorKind::Manual: return "manual";
    }
    return "rule_based";
}

std::optional<TranslatorKind> translator_kind_from_string(std::string_view name) noexcept {
    if (name == "remote") return TranslatorKind::Remote;
    if (name == "rule_based") return TranslatorKind::RuleBased;
    if (name == "manual") return TranslatorKind::Manual;
    return std::nullopt;
}

nlohmann::json correction_to_json(const Correction& c) {
    return {{"rule_id", c.rule_id}, {"json_path", c.json_path}, {"before", c.before}, {"after", c.after},
            {"message", c.message}};
}

Correction correction_from_json(const nlohmann::json& j) {
    return {j.at("rule_id").get<std::string>(), j.at("json_path").get<std::string>(), j.at("before"), j.at("after"),
            j.at("message").get<std::string>()};
}

std::string build_schema_prompt(const TranslationRequest& request, std::string_view retry_note) {
    std::map<std::string, std::string> values = {
        {"SCHEMA_JSON", schema_json_text(request.schema)},
        {"SEGMENT_TEXT", request.schema.segment_text_path()},
        {"SEGMENT_VECTOR", request.schema.segment_vector_path()},
        {"NESTED", request.schema.nested_field().value_or("")},
        {"GRAMMAR_JSON", trim(dsl::grammar_json_schema())},
        {"NL_QUERY", trim(request.nl_query)},
    };
    auto prompt = fill_template(resources::query_architect_prompt(), values);
    if (!retry_note.empty()) {
        if (!prompt.empty() && prompt.back() != '\n') prompt += '\n';
        prompt += "\n";
        prompt.append(retry_note);
        prompt += '\n';
    }
    return prompt;
}

TranslationResult translate_rule_based(const TranslationRequest& request) {
    const auto& schema = request.schema;
    const auto nested = schema.nested_field().value_or("segments");
    auto items = split_items(request.nl_query);

    std::vector<dsl::Query> pieces;
    std::optional<std::size_t> range_slot;
    std::vector<std::string> residual;

    for (std::size_t i = 0; i < items.size(); ++i) {
        const auto& item = items[i];
        if (item.phrase) {
            auto terms = tokenize_terms(item.text);
            if (terms.empty()) continue;
            std::string text;
            for (const auto& t : terms) text += (text.empty() ? "" : " ") + t;
            pieces.push_back(dsl::Match{"body", text});
            continue;
        }
        const auto& word = item.text;
        auto operand = [&](std::size_t prefix) { return strip_punct(std::string_view(word).substr(prefix)); };
        if (starts_with_ci(word, "from:") && !operand(5).empty()) {
            auto v = operand(5);
            std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
            pieces.push_back(dsl::Term{"sender", v});
            continue;
        }
        if (starts_with_ci(word, "to:") && !operand(3).empty()) {
            auto v = operand(3);
            std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
            pieces.push_back(dsl::Term{"recipients", v});
            continue;
        }
        const bool before = starts_with_ci(word, "before:");
        const bool after = starts_with_ci(word, "after:");
        if (before || after) {
            auto date = operand(before ? 7 : 6);
            if (dsl::is_date_literal(date)) {
                if (!range_slot) {
                    range_slot = pieces.size();
                    pieces.push_back(dsl::Range{"sent_date", std::nullopt, std::nullopt});
                }
                auto& r = std::get<dsl::Range>(pieces[*range_slot].node);
                (before ? r.lte : r.gte) = date;
                continue;
            }
        }
        auto bare = strip_punct(word);
        if (std::regex_match(bare, email_re())) {
            std::transform(bare.begin(), bare.end(), bare.begin(), [](unsigned char c) { return std::tolower(c); });
            pieces.push_back(dsl::Term{"people", bare});
            continue;
        }
        if (i + 1 < items.size() && !items[i + 1].phrase && is_capitalized(bare)) {
            auto next = strip_punct(items[i + 1].text);
            // The first word keeps no trailing punctuation of its own: "Smith, John" is not a name pair.
            if (is_capitalized(next) && bare == word) {
                pieces.push_back(dsl::Term{"people", bare + " " + next});
                ++i;
                continue;
            }
        }
        residual.push_back(word);
    }

    std::string rest;
    for (const auto& w : residual) rest += (rest.empty() ? "" : " ") + w;
    if (!tokenize_terms(rest).empty()) {
        dsl::Bool hybrid;
        hybrid.should.push_back(dsl::Match{"body", rest});
        hybrid.should.push_back(
            dsl::Nested{nested, dsl::Box<dsl::Query>(dsl::Knn{nested + "." + std::string(kSegmentVectorSubfield), rest, 100})});
        pieces.push_back(std::move(hybrid));
    }
    if (pieces.empty())
        throw Error(ErrorCode::EmptyIntent, "query has no searchable content", {{"nl_query", request.nl_query}});

    dsl::Bool root;
    root.must = std::move(pieces);
    TranslationResult result;
    result.query = std::move(root);
    result.kind = TranslatorKind::RuleBased;
    return result;
}

std::optional<std::pair<std::string, std::string>> extract_last_fenced_block(std::string_view reply) {
    std::vector<std::size_t> fences;
    for (auto pos = reply.find("```"); pos != std::string_view::npos; pos = reply.find("```", pos + 3)) fences.push_back(pos);
    if (fences.size() < 2) return std::nullopt;
    std::size_t pairs = fences.size() / 2;
    auto open = fences[2 * (pairs - 1)];
    auto close = fences[2 * (pairs - 1) + 1];
    auto line_end = reply.find('\n', open);
    auto body_start = line_end == std::string_view::npos || line_end > close ? open + 3 : line_end + 1;
    return std::pair{trim(reply.substr(0, open)), std::string(reply.substr(body_start, close - body_start))};
}

RemoteTranslator::RemoteTranslator(RemoteTranslatorOptions options)
    : options_(std::move(options)), inflight_(std::clamp(options_.max_inflight, 1, 64)) {
    detail::split_url(options_.url);
}

std::string RemoteTranslator::complete(const std::string& prompt) const {
    auto url = detail::split_url(options_.url);
    nlohmann::json body = {{"prompt", prompt}, {"max_tokens", options_.max_tokens}, {"temperature", options_.temperature}};
    httplib::Result res;
    {
        inflight_.acquire();
        struct Release {
            std::counting_semaphore<64>& s;
            ~Release() { s.release(); }
        } release{inflight_};
        httplib::Client client(url.origin);
        const auto secs = options_.timeout.count() / 1000;
        const auto usecs = (options_.timeout.count() % 1000) * 1000;
        client.set_connection_timeout(secs, usecs);
        client.set_read_timeout(secs, usecs);
        client.set_write_timeout(secs, usecs);
        res = client.Post(url.path, body.dump(), "application/json");
    }
    if (!res)
        throw Error(ErrorCode::TranslatorUnavailable, "translator endpoint unreachable: " + httplib::to_string(res.error()),
                    {{"url", options_.url}});
    if (res->status != 200)
        throw Error(ErrorCode::TranslatorUnavailable, "translator endpoint returned HTTP " + std::to_string(res->status),
                    {{"url", options_.url}, {"status", res->status}});
    auto reply = nlohmann::json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("text") || !reply["text"].is_string())
        throw Error(ErrorCode::TranslatorUnavailable, "translator reply must be {\"text\": ...}", {{"url", options_.url}});
    return reply["text"].get<std::string>();
}

namespace {

TranslationResult parse_reply(const std::string& reply) {
    auto block = extract_last_fenced_block(reply);
    if (!block) throw Error(ErrorCode::ParseError, "reply has no fenced JSON block", {{"json_path", "$"}});
    auto j = nlohmann::json::parse(block->second, nullptr, false);
    if (j.is_discarded())
        throw Error(ErrorCode::ParseError, "fenced block is not valid JSON", {{"json_path", "$"}, {"reason", "syntax"}});
    TranslationResult result;
    result.kind = TranslatorKind::Remote;
    result.reasoning = block->first;
    if (j.is_object() && j.contains("query")) result.query = dsl::parse_request(j).query;
    else result.query = dsl::parse_query_node(j, "$.query");
    return result;
}

} // namespace

TranslationResult RemoteTranslator::translate(const TranslationRequest& request) const {
    if (trim(request.nl_query).empty())
        throw Error(ErrorCode::EmptyIntent, "query has no searchable content", {{"nl_query", request.nl_query}});
    auto first = complete(build_schema_prompt(request));
    try {
        return parse_reply(first);
    } catch (const Error& e) {
        if (e.code() != ErrorCode::ParseError) throw;
        auto note = std::string("Your previous reply could not be used: ") + e.what() +
                    ". Reply again with exactly one fenced JSON block holding the request.";
        auto second = complete(build_schema_prompt(request, note));
        try {
            return parse_reply(second);
        } catch (const Error& e2) {
            if (e2.code() != ErrorCode::ParseError) throw;
            throw Error(ErrorCode::UntranslatableResponse, std::string("translator reply could not be parsed: ") + e2.what(),
                        {{"raw_reply", second}, {"first_reply", first}, {"details", e2.details()}});
        }
    }
}

} // namespace evidex
