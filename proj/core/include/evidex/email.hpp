#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace evidex {

struct RawMessage {
    std::string source_uri;
    std::string bytes;
};

struct Mailbox {
    std::string display_name;  // may be empty
    std::string address;       // lowercased

    bool operator==(const Mailbox&) const = default;
};

struct ParsedEmail {
    std::string message_id;
    std::string sender;                   // address of the first From mailbox
    std::vector<std::string> recipients;  // To then Cc addresses, deduplicated
    std::vector<std::string> people;      // display names and addresses from From/To/Cc
    std::string subject;
    std::optional<std::string> sent_date;  // YYYY-MM-DDTHH:MM:SSZ
    std::optional<std::string> folder;
    std::map<std::string, std::string> x_headers;  // every header starting "X-"
    std::map<std::string, std::string> headers;    // remaining headers, lowercased names
    std::string body;                              // UTF-8
};

/// Splits the header block from the body at the first blank line, unfolds
/// continuation lines and maps the common Enron headers. A missing or
/// unparseable header block raises MalformedMessage. Without a Message-ID the
/// id falls back to "fnv1a64:<hex>" of the source bytes.
ParsedEmail parse_rfc822(const RawMessage& raw);

/// Comma-separated address list; quoted display names may contain commas.
std::vector<Mailbox> parse_address_list(std::string_view value);

/// Date header → UTC "YYYY-MM-DDTHH:MM:SSZ". Accepts RFC 2822 dates with or
/// without weekday and seconds, numeric or named zones, and ISO-8601.
std::optional<std::string> parse_email_date(std::string_view value);

/// Splits a body into message units at "-----Original Message-----" lines
/// and dash-framed "Forwarded by" lines. Quoted header runs at the top of a
/// unit are dropped and "> " prefixes removed. Unit 0 is the newest message;
/// empty units are omitted.
std::vector<std::string> disentangle_thread(std::string_view body);

/// UTF-8 input passes through; invalid sequences are read as Latin-1.
std::string normalize_charset(std::string_view bytes);

} // namespace evidex
