#include "evidex/config.hpp"
#include "evidex/error.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace evidex;
using json = nlohmann::json;

TEST_CASE("defaults are offline") {
    ServiceConfig c;
    CHECK(c.embedder.kind == EmbedderKind::Hashing);
    CHECK(c.translator.kind == TranslatorKind::RuleBased);
    CHECK(make_embedder(c.embedder)->descriptor() == "hashing-fnv1a64-w1c3-384");
}

TEST_CASE("json round trip and strictness") {
    auto c = config_from_json(json::parse(R"({"port": 9000, "data_dir": "/tmp/x",
        "translator": {"kind": "remote", "url": "http://h/complete"}, "fusion": {"mode": "lexical_only", "w_lex": 1, "w_sem": 0}})"));
    CHECK(c.port == 9000);
    CHECK(c.translator.kind == TranslatorKind::Remote);
    CHECK(c.translator.remote.url == "http://h/complete");
    CHECK(c.fusion.mode == FusionMode::LexicalOnly);
    auto back = config_from_json(config_to_json(c));
    CHECK(config_to_json(back) == config_to_json(c));
    CHECK_THROWS_AS(config_from_json({{"prot", 1}}), Error);
}

TEST_CASE("environment overrides") {
    ServiceConfig c;
    apply_env_overrides(c, {{"EVIDEX_PORT", "7070"},
                            {"EVIDEX_DATA_DIR", "/srv/evidex"},
                            {"EVIDEX_TRANSLATOR_URL", "http://llm/complete"},
                            {"EVIDEX_EMBEDDER_URL", "http://emb/embed"}});
    CHECK(c.port == 7070);
    CHECK(c.data_dir == "/srv/evidex");
    CHECK(c.translator.kind == TranslatorKind::Remote);
    CHECK(c.embedder.kind == EmbedderKind::Remote);
    CHECK(c.embedder.remote.url == "http://emb/embed");
    CHECK_THROWS_AS(apply_env_overrides(c, {{"EVIDEX_PORT", "many"}}), Error);
}

TEST_CASE("load from file") {
    fixtures::TempDir tmp;
    fixtures::write_file(tmp / "c.json", R"({"host": "0.0.0.0"})");
    CHECK(load_config(tmp / "c.json").host == "0.0.0.0");
    CHECK_THROWS_AS(load_config(tmp / "missing.json"), Error);
}
