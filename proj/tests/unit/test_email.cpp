#include "evidex/email.hpp"
#include "evidex/error.hpp"

#include <doctest.h>

using namespace evidex;

namespace {

const char* kMessage =
    "Message-ID: <1234.JavaMail.evans@thyme>\n"
    "Date: Wed, 17 Oct 2001 09:12:00 -0700 (PDT)\n"
    "From: sherron.watkins@enron.com\n"
    "To: kenneth.lay@enron.com, \"Causey, Richard\" <richard.causey@enron.com>\n"
    "Cc: jeff.skilling@enron.com\n"
    "Subject: Accounting\n"
    " questions\n"
    "X-From: Watkins, Sherron\n"
    "X-To: Lay, Kenneth\n"
    "X-Folder: \\SWATKIN (Non-Privileged)\\Sent\n"
    "\n"
    "Ken,\n\nI am nervous.\n";

} // namespace

TEST_CASE("headers are mapped") {
    auto e = parse_rfc822({"mem://1", kMessage});
    CHECK(e.message_id == "1234.JavaMail.evans@thyme");
    CHECK(e.sender == "sherron.watkins@enron.com");
    CHECK(e.recipients ==
          std::vector<std::string>{"kenneth.lay@enron.com", "richard.causey@enron.com", "jeff.skilling@enron.com"});
    CHECK(e.subject == "Accounting questions");
    CHECK(e.sent_date == "2001-10-17T16:12:00Z");
    CHECK(e.x_headers.at("X-From") == "Watkins, Sherron");
    CHECK(e.x_headers.size() == 3);
    CHECK(e.body == "Ken,\n\nI am nervous.\n");
    CHECK(std::find(e.people.begin(), e.people.end(), "Causey, Richard") != e.people.end());
}

TEST_CASE("missing message id falls back to a content hash") {
    auto e = parse_rfc822({"mem://2", "From: a@b.com\nSubject: x\n\nbody"});
    CHECK(e.message_id.rfind("fnv1a64:", 0) == 0);
    CHECK(e.message_id == parse_rfc822({"mem://3", "From: a@b.com\nSubject: x\n\nbody"}).message_id);
}

TEST_CASE("malformed header blocks") {
    CHECK_THROWS_AS(parse_rfc822({"m", "no headers here at all"}), Error);
    CHECK_THROWS_AS(parse_rfc822({"m", " continuation first\nFrom: a@b\n\nx"}), Error);
}

TEST_CASE("address lists") {
    auto v = parse_address_list("\"Lay, Kenneth\" <Kenneth.Lay@Enron.com>, bare@x.org, Name <n@y.com>");
    REQUIRE(v.size() == 3);
    CHECK(v[0] == Mailbox{"Lay, Kenneth", "kenneth.lay@enron.com"});
    CHECK(v[1].address == "bare@x.org");
    CHECK(v[2].display_name == "Name");
}

TEST_CASE("date formats") {
    CHECK(parse_email_date("Mon, 14 May 2001 16:39:00 -0700 (PDT)") == "2001-05-14T23:39:00Z");
    CHECK(parse_email_date("14 May 2001 16:39 +0000") == "2001-05-14T16:39:00Z");
    CHECK(parse_email_date("Mon, 31 Dec 2001 23:30:00 -0200") == "2002-01-01T01:30:00Z");
    CHECK(parse_email_date("2001-05-14T16:39:00Z") == "2001-05-14T16:39:00Z");
    CHECK_FALSE(parse_email_date("someday").has_value());
}

TEST_CASE("thread disentangling") {
    auto units = disentangle_thread(
        "Newest reply.\n\n"
        "-----Original Message-----\n"
        "From: \tFastow, Andrew\n"
        "Sent:\tMonday, May 14, 2001 9:12 AM\n"
        "To:\tSkilling, Jeff\n"
        "Subject:\tRE: raptor\n\n"
        "> Older text\n> continues.\n\n"
        "---------------------- Forwarded by Ben Glisan/HOU/ECT on 05/12/2001 07:45 PM ---------------------------\n\n"
        "Oldest text.\n");
    REQUIRE(units.size() == 3);
    CHECK(units[0] == "Newest reply.");
    CHECK(units[1] == "Older text\ncontinues.");
    CHECK(units[2] == "Oldest text.");
}

TEST_CASE("a body without markers is one unit") {
    auto units = disentangle_thread("Just one message.\nTwo lines.");
    REQUIRE(units.size() == 1);
    CHECK(units[0] == "Just one message.\nTwo lines.");
    CHECK(disentangle_thread("").empty());
}

TEST_CASE("charset normalization") {
    CHECK(normalize_charset("caf\xc3\xa9") == "caf\xc3\xa9");
    CHECK(normalize_charset("caf\xe9") == "caf\xc3\xa9");
}
