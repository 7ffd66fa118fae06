#include "evidex/error.hpp"
#include "evidex/ingestion.hpp"

#include "fixtures.hpp"

#include <doctest.h>

using namespace evidex;

namespace {

std::string message(const std::string& id, const std::string& body) {
    return "Message-ID: <" + id + ">\nDate: Tue, 1 May 2001 10:00:00 -0500\nFrom: \"Lay, Kenneth\" <kenneth.lay@enron.com>\n"
           "To: jeff.skilling@enron.com\nSubject: hello\nX-Folder: \\Lay-K\\Inbox\nX-Origin: Lay-K\n\n" + body;
}

} // namespace

TEST_CASE("maildir schema adds x_headers") {
    auto s = maildir_schema();
    CHECK(s.type_of("x_headers") == FieldType::Keyword);
    CHECK(s.version == 2);
    CHECK(s.fields.size() == default_enron_schema().fields.size() + 1);
}

TEST_CASE("build_document maps fields and segments") {
    auto email = parse_rfc822({"mem://1", message("m1@test", "Top reply.\n\n-----Original Message-----\nFrom: a@b\nSubject: x\n\nOlder part.\n")});
    auto doc = build_document(email, {}, HashingEmbedder{}, "mem://1");
    CHECK(doc.doc_id == "m1@test");
    CHECK(doc.source_uri == "mem://1");
    CHECK(std::get<std::string>(doc.fields.at("sender")) == "kenneth.lay@enron.com");
    CHECK(std::get<std::string>(doc.fields.at("sent_date")) == "2001-05-01T15:00:00Z");
    auto xh = std::get<std::vector<std::string>>(doc.fields.at("x_headers"));
    CHECK(xh == std::vector<std::string>{"X-Folder: \\Lay-K\\Inbox", "X-Origin: Lay-K"});
    REQUIRE(doc.segments.size() == 2);
    CHECK(doc.segments[0].text == "Top reply.");
    CHECK(doc.segments[1].text == "Older part.");
    auto payload = disentangled_payload({"Top reply.", "Older part."});
    CHECK(payload.substr(doc.segments[1].span.start, doc.segments[1].span.end - doc.segments[1].span.start) == "Older part.");
    CHECK(validate_document(doc, maildir_schema()).ok());
}

TEST_CASE("corpus listing is sorted and skips dotfiles") {
    fixtures::TempDir tmp;
    fixtures::write_file(tmp / "b/2.", "x");
    fixtures::write_file(tmp / "a/10.", "x");
    fixtures::write_file(tmp / ".hidden", "x");
    auto files = list_corpus(tmp.path());
    REQUIRE(files.size() == 2);
    CHECK(files[0].filename() == "10.");
    CHECK_THROWS_AS(list_corpus(tmp / "missing"), Error);
}

TEST_CASE("ingestion is idempotent and worker-count independent") {
    fixtures::TempDir tmp;
    for (int i = 0; i < 30; ++i)
        fixtures::write_file(tmp / ("corpus/" + std::to_string(i) + "."),
                             message("m" + std::to_string(i) + "@test", "message number " + std::to_string(i) + "\n"));
    fixtures::write_file(tmp / "corpus/bad.", "this is not an email");

    auto embedder = std::make_shared<HashingEmbedder>();
    SearchEngine one(maildir_schema(), embedder), four(maildir_schema(), embedder);
    auto r1 = ingest_corpus(tmp / "corpus", one, tmp / "q1.jsonl", {}, 1);
    auto r4 = ingest_corpus(tmp / "corpus", four, tmp / "q4.jsonl", {}, 4, {std::chrono::milliseconds(60000), 2});
    CHECK(r1.indexed == 30);
    CHECK(r1.failed == 1);
    REQUIRE(r1.failures.size() == 1);
    CHECK(r1.failures[0].code == "MalformedMessage");
    CHECK(r4.indexed == 30);
    CHECK(one.manifest() == four.manifest());

    auto again = ingest_corpus(tmp / "corpus", one, tmp / "q5.jsonl", {}, 2);
    CHECK(again.indexed == 0);
    CHECK(again.duplicates == 30);
}
