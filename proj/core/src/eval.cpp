#include "evidex/eval.hpp"

#include "evidex/auditor.hpp"
#include "evidex/error.hpp"

#include "detail/io.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace evidex {
namespace {

std::size_t hits_in_top(std::span<const std::string> ranked, const std::set<std::string>& relevant, std::size_t k) {
    std::size_t n = std::min(k, ranked.size());
    std::size_t hits = 0;
    for (std::size_t i = 0; i < n; ++i) hits += relevant.count(ranked[i]);
    return hits;
}

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

std::string weight_label(double w) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%g", w);
    return buf;
}

} // namespace

std::vector<Scenario> parse_scenarios(const nlohmann::json& j) {
    if (!j.is_array()) throw Error(ErrorCode::ParseError, "scenario file must be a JSON list", {{"json_path", "$"}});
    if (j.empty()) throw Error(ErrorCode::InvalidArgument, "no scenarios");
    std::vector<Scenario> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto path = "$[" + std::to_string(i) + "]";
        try {
            Scenario s;
            s.scenario_id = j[i].at("scenario_id").get<std::string>();
            s.nl_query = j[i].at("nl_query").get<std::string>();
            for (const auto& id : j[i].at("relevant_doc_ids")) s.relevant_doc_ids.insert(id.get<std::string>());
            s.notes = j[i].value("notes", "");
            if (s.relevant_doc_ids.empty())
                throw Error(ErrorCode::InvalidArgument, "scenario '" + s.scenario_id + "' has no relevant documents",
                            {{"json_path", path}});
            if (!seen.insert(s.scenario_id).second)
                throw Error(ErrorCode::InvalidArgument, "duplicate scenario id '" + s.scenario_id + "'",
                            {{"json_path", path}});
            out.push_back(std::move(s));
        } catch (const nlohmann::json::exception& e) {
            throw Error(ErrorCode::ParseError, "malformed scenario", {{"json_path", path}, {"reason", e.what()}});
        }
    }
    return out;
}

std::vector<Scenario> load_scenarios(const std::filesystem::path& path) {
    auto j = nlohmann::json::parse(detail::read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::ParseError, "scenario file is not JSON", {{"path", path.string()}});
    return parse_scenarios(j);
}

std::vector<Scenario> load_judgments(const std::filesystem::path& topics, const std::filesystem::path& qrels) {
    auto j = nlohmann::json::parse(detail::read_file(topics), nullptr, false);
    if (j.is_discarded() || !j.is_array())
        throw Error(ErrorCode::ParseError, "topics file must be a JSON list", {{"path", topics.string()}});
    std::map<std::string, std::set<std::string>> relevant;
    std::size_t line_no = 0;
    detail::for_each_line(qrels, [&](const std::string& line) {
        ++line_no;
        std::istringstream in(line);
        std::string id, doc;
        double rel = 0;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') return;
        if (!(in >> id >> doc >> rel))
            throw Error(ErrorCode::ParseError, "qrels line must be 'scenario_id doc_id relevance'",
                        {{"path", qrels.string()}, {"line", line_no}});
        if (rel > 0) relevant[id].insert(doc);
    });
    nlohmann::json merged = nlohmann::json::array();
    for (auto topic : j) {
        auto id = topic.at("scenario_id").get<std::string>();
        topic["relevant_doc_ids"] = relevant[id];
        merged.push_back(topic);
    }
    return parse_scenarios(merged);
}

double recall_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant, int k) {
    if (relevant.empty()) throw Error(ErrorCode::InvalidArgument, "recall is undefined for an empty relevant set");
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1", {{"k", k}});
    return static_cast<double>(hits_in_top(ranked, relevant, static_cast<std::size_t>(k))) /
           static_cast<double>(relevant.size());
}

double precision_at_k(std::span<const std::string> ranked, const std::set<std::string>& relevant, int k) {
    if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1", {{"k", k}});
    if (ranked.empty()) return 0.0;
    auto denom = std::min(static_cast<std::size_t>(k), ranked.size());
    return static_cast<double>(hits_in_top(ranked, relevant, denom)) / static_cast<double>(denom);
}

AblationConfig AblationConfig::canonical() {
    AblationConfig c;
    c.configs = {{"lexical_only", {FusionMode::LexicalOnly, 1.0, 0.0, 1000}},
                 {"semantic_only", {FusionMode::SemanticOnly, 0.0, 1.0, 1000}},
                 {"hybrid", {FusionMode::Hybrid, 0.5, 0.5, 1000}}};
    return c;
}

AblationConfig parse_ablation_config(const nlohmann::json& j) {
    if (!j.is_object()) throw Error(ErrorCode::ParseError, "ablation config must be a JSON object", {{"json_path", "$"}});
    AblationConfig out;
    for (const auto& [key, value] : j.items()) {
        if (key != "configs" && key != "k" && key != "weight_sweep")
            throw Error(ErrorCode::ParseError, "unknown ablation key", {{"json_path", "$." + key}});
    }
    if (!j.contains("configs") || !j["configs"].is_array())
        throw Error(ErrorCode::ParseError, "ablation config needs a 'configs' list", {{"json_path", "$.configs"}});
    std::set<std::string> names;
    for (std::size_t i = 0; i < j["configs"].size(); ++i) {
        const auto path = "$.configs[" + std::to_string(i) + "]";
        auto entry = j["configs"][i];
        if (!entry.is_object() || !entry.contains("name") || !entry["name"].is_string())
            throw Error(ErrorCode::ParseError, "config needs a string 'name'", {{"json_path", path}});
        auto name = entry["name"].get<std::string>();
        entry.erase("name");
        auto fusion = fusion_from_json(entry, path);
        validate_fusion(fusion);
        if (!names.insert(name).second)
            throw Error(ErrorCode::InvalidArgument, "duplicate config name '" + name + "'", {{"json_path", path}});
        out.configs.push_back({name, fusion});
    }
    if (j.contains("weight_sweep")) {
        for (const auto& w : j["weight_sweep"]) {
            if (!w.is_number()) throw Error(ErrorCode::ParseError, "sweep weights must be numbers", {{"json_path", "$.weight_sweep"}});
            double wl = w.get<double>();
            if (wl < 0.0 || wl > 1.0)
                throw Error(ErrorCode::InvalidFusionConfig, "sweep weights must lie in [0, 1]", {{"w_lex", wl}});
            auto name = "hybrid_w" + weight_label(wl);
            if (!names.insert(name).second) continue;
            out.configs.push_back({name, {FusionMode::Hybrid, wl, 1.0 - wl, 1000}});
        }
    }
    if (j.contains("k")) {
        out.ks.clear();
        for (const auto& k : j["k"]) {
            if (!k.is_number_integer() || k.get<int>() < 1)
                throw Error(ErrorCode::ParseError, "k values must be positive integers", {{"json_path", "$.k"}});
            out.ks.push_back(k.get<int>());
        }
        if (out.ks.empty()) throw Error(ErrorCode::InvalidArgument, "at least one k value is required");
    }
    for (auto mode : {FusionMode::LexicalOnly, FusionMode::SemanticOnly, FusionMode::Hybrid}) {
        bool present = std::any_of(out.configs.begin(), out.configs.end(),
                                   [&](const NamedFusion& c) { return c.fusion.mode == mode; });
        if (!present)
            throw Error(ErrorCode::InvalidArgument,
                        "ablation configs must include a " + std::string(to_string(mode)) + " config");
    }
    return out;
}

AblationConfig load_ablation_config(const std::filesystem::path& path) {
    auto j = nlohmann::json::parse(detail::read_file(path), nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::ParseError, "ablation config is not JSON", {{"path", path.string()}});
    return parse_ablation_config(j);
}

std::string AblationTable::to_csv() const {
    std::string out = "scenario_id,config,mode,w_lex,w_sem,k,recall,precision,retrieved,relevant\n";
    for (const auto& r : rows) {
        out += r.scenario_id + "," + r.config + "," + std::string(to_string(r.fusion.mode)) + "," +
               fixed(r.fusion.w_lex, 2) + "," + fixed(r.fusion.w_sem, 2) + "," + std::to_string(r.k) + "," +
               fixed(r.recall) + "," + fixed(r.precision) + "," + std::to_string(r.retrieved) + "," +
               std::to_string(r.relevant) + "\n";
    }
    return out;
}

std::string AblationTable::to_text() const {
    std::vector<std::vector<std::string>> cells = {{"scenario", "config", "k", "recall", "precision", "retrieved"}};
    for (const auto& r : rows) {
        cells.push_back({r.scenario_id, r.config, std::to_string(r.k), fixed(r.recall, 4), fixed(r.precision, 4),
                         std::to_string(r.retrieved)});
    }

    std::vector<std::string> config_order;
    std::vector<int> k_order;
    std::map<std::pair<std::string, int>, std::pair<double, double>> sums;
    std::map<std::pair<std::string, int>, int> counts;
    for (const auto& r : rows) {
        if (std::find(config_order.begin(), config_order.end(), r.config) == config_order.end())
            config_order.push_back(r.config);
        if (std::find(k_order.begin(), k_order.end(), r.k) == k_order.end()) k_order.push_back(r.k);
        auto& s = sums[{r.config, r.k}];
        s.first += r.recall;
        s.second += r.precision;
        ++counts[{r.config, r.k}];
    }
    for (const auto& c : config_order) {
        for (int k : k_order) {
            auto key = std::pair{c, k};
            if (!counts.contains(key)) continue;
            double n = counts[key];
            cells.push_back({"(mean)", c, std::to_string(k), fixed(sums[key].first / n, 4),
                             fixed(sums[key].second / n, 4), ""});
        }
    }

    std::vector<std::size_t> width(cells.front().size(), 0);
    for (const auto& row : cells)
        for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
    std::string out;
    auto emit = [&](const std::vector<std::string>& row) {
        std::string line;
        for (std::size_t i = 0; i < row.size(); ++i) {
            bool numeric = i >= 2;
            auto pad = std::string(width[i] - row[i].size(), ' ');
            line += numeric ? pad + row[i] : row[i] + pad;
            if (i + 1 < row.size()) line += "  ";
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + "\n";
    };
    emit(cells.front());
    std::string rule;
    for (std::size_t i = 0; i < width.size(); ++i) rule += std::string(width[i], '-') + (i + 1 < width.size() ? "  " : "");
    out += rule + "\n";
    for (std::size_t i = 1; i < cells.size(); ++i) emit(cells[i]);
    return out;
}

const ResultRow* AblationTable::find(const std::string& scenario_id, const std::string& config, int k) const {
    for (const auto& r : rows)
        if (r.scenario_id == scenario_id && r.config == config && r.k == k) return &r;
    return nullptr;
}

AblationTable run_ablation(const SearchEngine& engine, const std::vector<Scenario>& scenarios,
                           const AblationConfig& config, const Translator& translator, int workers) {
    if (scenarios.empty()) throw Error(ErrorCode::InvalidArgument, "no scenarios");
    if (config.configs.empty()) throw Error(ErrorCode::InvalidArgument, "no ablation configs");

    nlohmann::json unknown = nlohmann::json::array();
    for (const auto& s : scenarios)
        for (const auto& id : s.relevant_doc_ids)
            if (!engine.contains(id)) unknown.push_back({{"scenario_id", s.scenario_id}, {"doc_id", id}});
    if (!unknown.empty())
        throw Error(ErrorCode::NotFound, "ground truth references documents missing from the index",
                    {{"unknown", unknown}});

    std::vector<std::vector<ResultRow>> per_scenario(scenarios.size());
    std::atomic<std::size_t> next{0};
    std::mutex error_mutex;
    std::exception_ptr error;

    auto work = [&] {
        while (true) {
            auto i = next.fetch_add(1);
            if (i >= scenarios.size()) return;
            try {
                const auto& s = scenarios[i];
                TranslationRequest tr{s.nl_query, engine.schema(), {}};
                auto translation = translator.translate(tr);
                auto audited = audit_query(translation.query, engine.schema(), s.nl_query);
                dsl::Request request;
                request.query = audited.query;
                auto execution = engine.execute(request);
                for (const auto& c : config.configs) {
                    auto ranked = fuse(execution.hits, c.fusion);
                    std::vector<std::string> ids;
                    ids.reserve(ranked.size());
                    for (const auto& r : ranked) ids.push_back(r.doc_id);
                    for (int k : config.ks) {
                        per_scenario[i].push_back({s.scenario_id, c.name, c.fusion, k,
                                                   recall_at_k(ids, s.relevant_doc_ids, k),
                                                   precision_at_k(ids, s.relevant_doc_ids, k), ids.size(),
                                                   s.relevant_doc_ids.size()});
                    }
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
            }
        }
    };

    workers = std::max(1, workers);
    std::vector<std::thread> pool;
    for (int w = 1; w < workers; ++w) pool.emplace_back(work);
    work();
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);

    std::vector<std::size_t> order(scenarios.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return scenarios[a].scenario_id < scenarios[b].scenario_id; });
    AblationTable table;
    for (auto i : order) table.rows.insert(table.rows.end(), per_scenario[i].begin(), per_scenario[i].end());
    return table;
}

void write_results(const AblationTable& table, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    detail::write_file_atomic(dir / "results.csv", table.to_csv());
    detail::write_file_atomic(dir / "results.txt", table.to_text());
}

} // namespace evidex
