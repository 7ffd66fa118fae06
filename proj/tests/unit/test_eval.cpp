#include "evidex/error.hpp"
#include "evidex/eval.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace evidex;
using json = nlohmann::json;

TEST_CASE("recall and precision at k") {
    std::vector<std::string> ranked{"a", "x", "b", "y"};
    std::set<std::string> rel{"a", "b", "c"};
    CHECK(recall_at_k(ranked, rel, 1) == doctest::Approx(1.0 / 3));
    CHECK(recall_at_k(ranked, rel, 10) == doctest::Approx(2.0 / 3));
    CHECK(precision_at_k(ranked, rel, 2) == doctest::Approx(0.5));
    CHECK(precision_at_k(ranked, rel, 10) == doctest::Approx(0.5));
    CHECK(precision_at_k({}, rel, 10) == 0.0);
    CHECK_THROWS_AS(recall_at_k(ranked, {}, 5), Error);
    CHECK_THROWS_AS(recall_at_k(ranked, rel, 0), Error);
}

TEST_CASE("scenario parsing") {
    auto s = parse_scenarios(json::parse(R"([{"scenario_id":"S1","nl_query":"q","relevant_doc_ids":["a"]}])"));
    REQUIRE(s.size() == 1);
    CHECK(s[0].relevant_doc_ids == std::set<std::string>{"a"});
    CHECK_THROWS_AS(parse_scenarios(json::array()), Error);
    CHECK_THROWS_AS(parse_scenarios(json::parse(R"([{"scenario_id":"S1","nl_query":"q","relevant_doc_ids":[]}])")), Error);
}

TEST_CASE("judgments from topics and qrels") {
    fixtures::TempDir tmp;
    fixtures::write_file(tmp / "topics.json", R"([{"scenario_id":"T1","nl_query":"raptor"}])");
    fixtures::write_file(tmp / "qrels.txt", "T1 a 1\nT1 b 0\nT1 c 2\n");
    auto s = load_judgments(tmp / "topics.json", tmp / "qrels.txt");
    REQUIRE(s.size() == 1);
    CHECK(s[0].relevant_doc_ids == std::set<std::string>{"a", "c"});
}

TEST_CASE("ablation config") {
    auto c = parse_ablation_config(json::parse(R"({"configs":[
        {"name":"l","mode":"lexical_only","w_lex":1,"w_sem":0},
        {"name":"s","mode":"semantic_only","w_lex":0,"w_sem":1},
        {"name":"h","mode":"hybrid","w_lex":0.5,"w_sem":0.5}],
        "k":[5],"weight_sweep":[0.25]})"));
    CHECK(c.configs.size() == 4);
    CHECK(c.configs.back().name == "hybrid_w0.25");
    CHECK(c.configs.back().fusion.w_sem == doctest::Approx(0.75));
    CHECK(c.ks == std::vector<int>{5});
    CHECK_THROWS_AS(parse_ablation_config(json::parse(R"({"configs":[{"name":"l","mode":"lexical_only"}]})")), Error);
    CHECK(AblationConfig::canonical().configs.size() == 3);
}

TEST_CASE("run ablation on a tiny corpus") {
    SearchEngine engine(default_enron_schema(), std::make_shared<HashingEmbedder>());
    engine.add_document(fixtures::make_doc("a", {"raptor hedge losses"}));
    engine.add_document(fixtures::make_doc("b", {"gas desk"}));
    engine.add_document(fixtures::make_doc("c", {"raptor capacity"}));
    std::vector<Scenario> scenarios{{"S1", "raptor", {"a", "c"}, ""}};
    auto table = run_ablation(engine, scenarios, AblationConfig::canonical(), RuleBasedTranslator{});
    CHECK(table.rows.size() == 3 * 2);
    const auto* lex = table.find("S1", "lexical_only", 10);
    REQUIRE(lex);
    CHECK(lex->recall == doctest::Approx(1.0));
    CHECK(lex->relevant == 2);

    auto csv = table.to_csv();
    CHECK(csv.rfind("scenario_id,", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    CHECK(table.to_text().find("hybrid") != std::string::npos);

    std::vector<Scenario> unknown{{"S2", "raptor", {"zzz"}, ""}};
    CHECK_THROWS_AS(run_ablation(engine, unknown, AblationConfig::canonical(), RuleBasedTranslator{}), Error);

    fixtures::TempDir tmp;
    write_results(table, tmp.path());
    CHECK(fixtures::read_file(tmp / "results.csv") == csv);
}
