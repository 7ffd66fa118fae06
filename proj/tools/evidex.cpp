#include "evidex/config.hpp"
#include "evidex/error.hpp"
#include "evidex/eval.hpp"
#include "evidex/service.hpp"
#include "evidex/workspace.hpp"

#include <CLI11.hpp>

#include <csignal>
#include <fstream>
#include <iostream>
#include <pthread.h>
#include <thread>

namespace {

using evidex::Error;
using evidex::ErrorCode;

struct Common {
    std::string config_path;
    std::string data_dir;
    std::string synonyms;
};

evidex::ServiceConfig resolve_config(const Common& common) {
    evidex::ServiceConfig config;
    if (!common.config_path.empty()) config = evidex::load_config(common.config_path);
    evidex::apply_env_overrides(config, evidex::process_env());
    if (!common.data_dir.empty()) config.data_dir = common.data_dir;
    if (!common.synonyms.empty()) config.synonyms = common.synonyms;
    return config;
}

evidex::WorkspaceOptions workspace_options(const evidex::ServiceConfig& config) {
    evidex::WorkspaceOptions opts;
    opts.embedder = config.embedder;
    opts.translator = config.translator;
    if (config.synonyms) {
        std::vector<std::string> malformed;
        opts.synonyms = evidex::load_synonym_file(config.synonyms->string(), &malformed);
        for (const auto& line : malformed) std::cerr << "warning: skipped synonym line: " << line << '\n';
    }
    opts.chunk_profile = config.chunk_profile;
    opts.fusion = config.fusion;
    opts.ingest_workers = config.ingest_workers;
    return opts;
}

evidex::ChunkProfile load_profile(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open chunk profile", {{"path", path}});
    auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::ParseError, "chunk profile is not JSON", {{"path", path}});
    auto profile = evidex::profile_from_json(j);
    evidex::validate_profile(profile);
    return profile;
}

int cmd_ingest(const Common& common, const std::string& corpus, const std::string& case_id,
               const std::string& profile_path, int workers) {
    auto config = resolve_config(common);
    evidex::Workspace ws(config.data_dir, workspace_options(config));
    auto profile = profile_path.empty() ? config.chunk_profile : load_profile(profile_path);
    auto [c, report] = ws.ingest_case(case_id, corpus, profile, workers > 0 ? workers : config.ingest_workers);
    std::cout << "case " << c.case_id << ": indexed " << report.indexed << ", duplicates " << report.duplicates
              << ", failed " << report.failed << ", documents " << c.document_count << '\n';
    for (const auto& f : report.failures) std::cerr << "failed " << f.source_uri << " [" << f.code << "] " << f.message << '\n';
    return 0;
}

int cmd_eval(const Common& common, const std::string& case_id, const std::string& scenarios_path,
             const std::string& qrels_path, const std::string& configs_path, const std::string& out, int workers) {
    auto config = resolve_config(common);
    evidex::Workspace ws(config.data_dir, workspace_options(config));
    auto engine = ws.engine(case_id);
    auto scenarios = qrels_path.empty() ? evidex::load_scenarios(scenarios_path)
                                        : evidex::load_judgments(scenarios_path, qrels_path);
    auto ablation = configs_path.empty() ? evidex::AblationConfig::canonical() : evidex::load_ablation_config(configs_path);
    auto table = evidex::run_ablation(*engine, scenarios, ablation, ws.translator(config.translator.kind), workers);
    evidex::write_results(table, out);
    std::cout << table.to_text();
    return 0;
}

int cmd_query(const Common& common, const std::string& case_id, const std::string& nl, const std::string& dsl, int size) {
    auto config = resolve_config(common);
    evidex::Workspace ws(config.data_dir, workspace_options(config));
    evidex::QuerySession s;
    if (!dsl.empty()) {
        auto j = nlohmann::json::parse(dsl, nullptr, false);
        if (j.is_discarded()) throw Error(ErrorCode::ParseError, "dsl is not JSON", {{"json_path", "$"}});
        s = ws.submit_dsl_query(case_id, j, std::nullopt);
    } else {
        s = ws.submit_nl_query(case_id, nl, std::nullopt, std::nullopt);
    }
    std::cout << "session " << s.session_id << '\n';
    if (!s.reasoning.empty()) std::cout << "reasoning: " << s.reasoning << '\n';
    for (const auto& c : s.corrections) std::cout << "correction " << c.rule_id << " at " << c.json_path << ": " << c.message << '\n';
    std::cout << "dsl: " << s.request.dump() << '\n';
    for (const auto& r : s.results) {
        if (r.rank > size) break;
        std::cout << r.rank << '\t' << r.fused_score << '\t' << r.doc_id << '\n';
    }
    return 0;
}

int cmd_serve(const Common& common, const std::string& host, int port) {
    auto config = resolve_config(common);
    if (!host.empty()) config.host = host;
    if (port >= 0) config.port = port;

    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    auto ws = std::make_shared<evidex::Workspace>(config.data_dir, workspace_options(config));
    evidex::Service service(ws, config.cors_origin);
    std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        service.stop();
    });
    waiter.detach();

    bool ok = service.run(config.host, config.port, [&](int bound) {
        std::cout << "listening on " << config.host << ':' << bound << std::endl;
    });
    if (!ok) {
        std::cerr << "error: cannot bind " << config.host << ':' << config.port << '\n';
        return 1;
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"evidex: hybrid forensic e-mail search"};
    app.require_subcommand(1);

    Common common;
    auto add_common = [&](CLI::App* cmd) {
        cmd->add_option("--config", common.config_path, "JSON config file")->check(CLI::ExistingFile);
        cmd->add_option("--data-dir", common.data_dir, "Workspace directory");
        cmd->add_option("--synonyms", common.synonyms, "Synonym groups file")->check(CLI::ExistingFile);
    };

    std::string corpus, case_id, profile, scenarios, qrels, configs, out = "results", nl, dsl, host;
    int workers = 0, port = -1, size = 10;

    auto* ingest = app.add_subcommand("ingest", "Ingest a maildir corpus into a case");
    add_common(ingest);
    ingest->add_option("--corpus", corpus, "Corpus directory")->required();
    ingest->add_option("--case", case_id, "Case id")->required();
    ingest->add_option("--profile", profile, "Chunk profile JSON")->check(CLI::ExistingFile);
    ingest->add_option("--workers", workers, "Ingestion workers");

    auto* eval = app.add_subcommand("eval", "Evaluation harness");
    eval->require_subcommand(1);
    auto* eval_run = eval->add_subcommand("run", "Run the retrieval-mode ablation");
    add_common(eval_run);
    eval_run->add_option("--case", case_id, "Case id")->required();
    eval_run->add_option("--scenarios", scenarios, "Scenario JSON, or topics JSON with --qrels")->required()->check(CLI::ExistingFile);
    eval_run->add_option("--qrels", qrels, "Relevance judgments")->check(CLI::ExistingFile);
    eval_run->add_option("--configs", configs, "Ablation config JSON")->check(CLI::ExistingFile);
    eval_run->add_option("--out", out, "Output directory");
    eval_run->add_option("--workers", workers, "Parallel scenarios");

    auto* query = app.add_subcommand("query", "Run one query and record a session");
    add_common(query);
    query->add_option("--case", case_id, "Case id")->required();
    auto* nl_opt = query->add_option("--nl", nl, "Natural-language query");
    auto* dsl_opt = query->add_option("--dsl", dsl, "Request JSON");
    nl_opt->excludes(dsl_opt);
    query->add_option("--size", size, "Results to print");

    auto* serve = app.add_subcommand("serve", "Start the REST service");
    add_common(serve);
    serve->add_option("--host", host, "Bind address");
    serve->add_option("--port", port, "Port (0 picks a free one)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*ingest) return cmd_ingest(common, corpus, case_id, profile, workers);
        if (*eval_run) return cmd_eval(common, case_id, scenarios, qrels, configs, out, workers > 0 ? workers : 1);
        if (*query) {
            if (nl.empty() && dsl.empty()) throw Error(ErrorCode::InvalidArgument, "one of --nl or --dsl is required");
            return cmd_query(common, case_id, nl, dsl, size);
        }
        if (*serve) return cmd_serve(common, host, port);
    } catch (const Error& e) {
        std::cerr << "error: " << evidex::to_string(e.code()) << ": " << e.what();
        if (!e.details().empty()) std::cerr << ' ' << e.details().dump();
        std::cerr << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
