#include "evidex/email.hpp"

#include "evidex/embedding.hpp"
#include "evidex/error.hpp"

#include "detail/utf8.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cctype>
#include <cstdio>
#include <regex>

namespace evidex {
namespace {

std::string trim(std::string_view s) {
    auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

std::string lower_ascii(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
    return out;
}

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](unsigned char x, unsigned char y) {
               return std::tolower(x) == std::tolower(y);
           });
}

bool is_blank(std::string_view line) { return line.find_first_not_of(" \t\r") == std::string_view::npos; }

std::vector<std::string> split_lines(std::string_view text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto nl = text.find('\n', start);
        if (nl == std::string_view::npos) {
            lines.emplace_back(text.substr(start));
            break;
        }
        lines.emplace_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    for (auto& l : lines)
        if (!l.empty() && l.back() == '\r') l.pop_back();
    return lines;
}

std::string join_lines(const std::vector<std::string>& lines, std::size_t from, std::size_t to) {
    std::string out;
    for (std::size_t i = from; i < to; ++i) {
        if (i > from) out += '\n';
        out += lines[i];
    }
    return out;
}

bool valid_field_name(std::string_view name) {
    if (name.empty()) return false;
    return std::all_of(name.begin(), name.end(), [](unsigned char c) { return c > 32 && c < 127 && c != ':'; });
}

void push_unique(std::vector<std::string>& out, const std::string& value) {
    if (!value.empty() && std::find(out.begin(), out.end(), value) == out.end()) out.push_back(value);
}

// ---- dates -----------------------------------------------------------------

std::optional<int> month_number(std::string_view name) {
    static constexpr std::array<std::string_view, 12> kMonths = {"jan", "feb", "mar", "apr", "may", "jun",
                                                                 "jul", "aug", "sep", "oct", "nov", "dec"};
    if (name.size() < 3) return std::nullopt;
    auto prefix = lower_ascii(name.substr(0, 3));
    for (std::size_t i = 0; i < kMonths.size(); ++i)
        if (prefix == kMonths[i]) return static_cast<int>(i) + 1;
    return std::nullopt;
}

std::optional<int> zone_offset_minutes(std::string_view zone) {
    if (zone.empty()) return 0;
    if ((zone[0] == '+' || zone[0] == '-') && zone.size() >= 3) {
        std::string digits;
        for (char c : zone.substr(1))
            if (std::isdigit(static_cast<unsigned char>(c))) digits += c;
        if (digits.size() != 4 && digits.size() != 2) return std::nullopt;
        int hh = std::stoi(digits.substr(0, 2));
        int mm = digits.size() == 4 ? std::stoi(digits.substr(2, 2)) : 0;
        if (hh > 23 || mm > 59) return std::nullopt;
        int total = hh * 60 + mm;
        return zone[0] == '-' ? -total : total;
    }
    static const std::map<std::string, int> kNamed = {
        {"ut", 0},     {"utc", 0},    {"gmt", 0},    {"z", 0},      {"est", -300}, {"edt", -240},
        {"cst", -360}, {"cdt", -300}, {"mst", -420}, {"mdt", -360}, {"pst", -480}, {"pdt", -420},
    };
    auto it = kNamed.find(lower_ascii(zone));
    if (it == kNamed.end()) return std::nullopt;
    return it->second;
}

std::optional<std::string> to_utc(int year, int month, int day, int hh, int mm, int ss, int offset_minutes) {
    using namespace std::chrono;
    year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                       std::chrono::day{static_cast<unsigned>(day)}};
    if (!ymd.ok() || hh > 23 || mm > 59 || ss > 60) return std::nullopt;
    auto t = sys_days{ymd} + hours{hh} + minutes{mm} + seconds{std::min(ss, 59)} - minutes{offset_minutes};
    auto days = floor<std::chrono::days>(t);
    year_month_day out{days};
    hh_mm_ss<seconds> tod{duration_cast<seconds>(t - days)};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02ldZ", static_cast<int>(out.year()),
                  static_cast<unsigned>(out.month()), static_cast<unsigned>(out.day()),
                  static_cast<long>(tod.hours().count()), static_cast<long>(tod.minutes().count()),
                  static_cast<long>(tod.seconds().count()));
    return std::string(buf);
}

// ---- thread markers --------------------------------------------------------

const std::regex& original_marker() {
    static const std::regex re(R"(^\s*-{2,}\s*original message\s*-{2,}\s*$)", std::regex::icase);
    return re;
}

const std::regex& forward_marker() {
    static const std::regex re(R"(^\s*-{2,}.*forwarded by.*$)", std::regex::icase);
    return re;
}

const std::regex& quoted_header() {
    static const std::regex re(R"(^\s*(from|sent|to|cc|bcc|subject|date|reply-to|x-[a-z0-9-]+)\s*:.*$)", std::regex::icase);
    return re;
}

const std::regex& dated_line() {
    static const std::regex re(R"(\d{1,2}/\d{1,2}/\d{2,4}(\s+\d{1,2}:\d{2}(:\d{2})?(\s*[AaPp][Mm])?)?)");
    return re;
}

bool is_dash_line(std::string_view line) {
    auto t = trim(line);
    return t.size() >= 2 && std::all_of(t.begin(), t.end(), [](char c) { return c == '-'; });
}

std::string dequote(const std::string& line) {
    std::size_t i = 0;
    while (i < line.size() && line[i] == '>') {
        ++i;
        if (i < line.size() && line[i] == ' ') ++i;
    }
    return line.substr(i);
}

// Removes quoted header runs: any run at the top of the unit (with an optional
// short "Name ... on <date>" prologue) and any run elsewhere of two or more
// header lines.
std::vector<std::string> strip_header_runs(const std::vector<std::string>& lines) {
    std::vector<bool> drop(lines.size(), false);

    auto run_end = [&](std::size_t i) {
        std::size_t j = i;
        std::size_t headers = 0;
        while (j < lines.size()) {
            if (std::regex_match(lines[j], quoted_header())) {
                ++headers;
                ++j;
                while (j < lines.size() && !lines[j].empty() && (lines[j][0] == ' ' || lines[j][0] == '\t') &&
                       !is_blank(lines[j]))
                    ++j;
            } else {
                break;
            }
        }
        return std::pair{j, headers};
    };

    std::size_t first = 0;
    while (first < lines.size() && is_blank(lines[first])) ++first;

    // Top-of-unit run, allowing up to two prologue lines carrying a date.
    for (std::size_t lead = 0; lead <= 2 && first + lead < lines.size(); ++lead) {
        auto [end, headers] = run_end(first + lead);
        if (headers == 0) {
            if (is_blank(lines[first + lead]) || lines[first + lead].size() > 120) break;
            continue;
        }
        if (lead > 0) {
            bool dated = false;
            for (std::size_t k = first; k < first + lead; ++k)
                if (std::regex_search(lines[k], dated_line())) dated = true;
            if (!dated) break;
        }
        for (std::size_t k = first; k < end; ++k) drop[k] = true;
        break;
    }

    for (std::size_t i = 0; i < lines.size();) {
        if (drop[i]) {
            ++i;
            continue;
        }
        auto [end, headers] = run_end(i);
        if (headers >= 2) {
            for (std::size_t k = i; k < end; ++k) drop[k] = true;
            i = end;
        } else {
            ++i;
        }
    }

    std::vector<std::string> kept;
    for (std::size_t i = 0; i < lines.size(); ++i)
        if (!drop[i]) kept.push_back(lines[i]);
    return kept;
}

std::string finish_unit(const std::vector<std::string>& raw) {
    std::vector<std::string> lines;
    lines.reserve(raw.size());
    for (const auto& l : raw) lines.push_back(dequote(l));
    lines = strip_header_runs(lines);
    std::size_t b = 0, e = lines.size();
    while (b < e && is_blank(lines[b])) ++b;
    while (e > b && is_blank(lines[e - 1])) --e;
    auto text = join_lines(lines, b, e);
    auto lead = text.find_first_not_of(" \t");
    if (lead == std::string::npos) return {};
    auto tail = text.find_last_not_of(" \t");
    return text.substr(lead, tail - lead + 1);
}

} // namespace

std::string normalize_charset(std::string_view bytes) { return detail::encode_utf8(detail::decode_utf8_lenient(bytes)); }

std::vector<Mailbox> parse_address_list(std::string_view value) {
    std::vector<std::string> items;
    std::string current;
    bool quoted = false;
    int angle = 0;
    for (char c : value) {
        if (c == '"') quoted = !quoted;
        else if (!quoted && c == '<') ++angle;
        else if (!quoted && c == '>' && angle > 0) --angle;
        if (c == ',' && !quoted && angle == 0) {
            items.push_back(current);
            current.clear();
        } else {
            current += c;
        }
    }
    items.push_back(current);

    std::vector<Mailbox> out;
    for (auto& raw : items) {
        auto item = trim(raw);
        if (item.empty()) continue;
        Mailbox box;
        auto lt = item.rfind('<');
        auto gt = item.rfind('>');
        if (lt != std::string::npos && gt != std::string::npos && gt > lt) {
            box.address = lower_ascii(trim(item.substr(lt + 1, gt - lt - 1)));
            box.display_name = trim(item.substr(0, lt));
        } else {
            auto open = item.find('(');
            auto close = item.rfind(')');
            if (open != std::string::npos && close != std::string::npos && close > open) {
                box.display_name = trim(item.substr(open + 1, close - open - 1));
                box.address = lower_ascii(trim(item.substr(0, open)));
            } else {
                box.address = lower_ascii(item);
            }
        }
        if (box.display_name.size() >= 2 && box.display_name.front() == '"' && box.display_name.back() == '"')
            box.display_name = trim(box.display_name.substr(1, box.display_name.size() - 2));
        if (box.display_name == box.address) box.display_name.clear();
        if (box.address.empty() && box.display_name.empty()) continue;
        out.push_back(std::move(box));
    }
    return out;
}

std::optional<std::string> parse_email_date(std::string_view value) {
    std::string text;
    int depth = 0;
    for (char c : value) {
        if (c == '(') ++depth;
        else if (c == ')' && depth > 0) --depth;
        else if (depth == 0) text += c;
    }
    text = trim(text);

    static const std::regex iso(
        R"(^(\d{4})-(\d{2})-(\d{2})(?:[T ](\d{2}):(\d{2})(?::(\d{2}))?(?:\.\d+)?\s*(Z|[+-]\d{2}:?\d{2})?)?$)");
    static const std::regex rfc(
        R"(^(?:[A-Za-z]{3,9},?\s+)?(\d{1,2})\s+([A-Za-z]{3,9})\.?\s+(\d{2,4})\s+(\d{1,2}):(\d{2})(?::(\d{2}))?\s*([+-]\d{4}|[A-Za-z]{1,4})?$)");

    std::smatch m;
    if (std::regex_match(text, m, iso)) {
        int offset = 0;
        if (m[7].matched) {
            auto z = zone_offset_minutes(m[7].str());
            if (!z) return std::nullopt;
            offset = *z;
        }
        return to_utc(std::stoi(m[1]), std::stoi(m[2]), std::stoi(m[3]), m[4].matched ? std::stoi(m[4]) : 0,
                      m[5].matched ? std::stoi(m[5]) : 0, m[6].matched ? std::stoi(m[6]) : 0, offset);
    }
    if (std::regex_match(text, m, rfc)) {
        auto month = month_number(m[2].str());
        if (!month) return std::nullopt;
        int year = std::stoi(m[3]);
        if (m[3].length() == 2) year += year < 50 ? 2000 : 1900;
        int offset = 0;
        if (m[7].matched) {
            auto z = zone_offset_minutes(m[7].str());
            if (!z) return std::nullopt;
            offset = *z;
        }
        return to_utc(year, *month, std::stoi(m[1]), std::stoi(m[4]), std::stoi(m[5]),
                      m[6].matched ? std::stoi(m[6]) : 0, offset);
    }
    return std::nullopt;
}

ParsedEmail parse_rfc822(const RawMessage& raw) {
    auto text = normalize_charset(raw.bytes);
    auto lines = split_lines(text);

    std::size_t blank = 0;
    while (blank < lines.size() && !lines[blank].empty()) ++blank;
    if (blank == 0) throw Error(ErrorCode::MalformedMessage, "message has no header block", {{"source", raw.source_uri}});

    std::vector<std::pair<std::string, std::string>> fields;
    for (std::size_t i = 0; i < blank; ++i) {
        const auto& line = lines[i];
        if (line[0] == ' ' || line[0] == '\t') {
            if (fields.empty())
                throw Error(ErrorCode::MalformedMessage, "continuation line before first header",
                            {{"source", raw.source_uri}, {"line", i + 1}});
            auto part = trim(line);
            if (!part.empty()) {
                auto& v = fields.back().second;
                if (!v.empty()) v += ' ';
                v += part;
            }
            continue;
        }
        auto colon = line.find(':');
        if (colon == std::string::npos || !valid_field_name(std::string_view(line).substr(0, colon)))
            throw Error(ErrorCode::MalformedMessage, "unparseable header line",
                        {{"source", raw.source_uri}, {"line", i + 1}});
        fields.emplace_back(line.substr(0, colon), trim(std::string_view(line).substr(colon + 1)));
    }

    ParsedEmail email;
    std::vector<Mailbox> from, to, cc;
    for (const auto& [name, value] : fields) {
        if (name.size() > 2 && (name[0] == 'X' || name[0] == 'x') && name[1] == '-') {
            auto [it, inserted] = email.x_headers.emplace(name, value);
            if (!inserted) it->second += ", " + value;
            if (iequals(name, "X-Folder") && !email.folder && !value.empty()) email.folder = value;
            continue;
        }
        auto key = lower_ascii(name);
        if (key == "from") {
            auto boxes = parse_address_list(value);
            from.insert(from.end(), boxes.begin(), boxes.end());
        } else if (key == "to") {
            auto boxes = parse_address_list(value);
            to.insert(to.end(), boxes.begin(), boxes.end());
        } else if (key == "cc") {
            auto boxes = parse_address_list(value);
            cc.insert(cc.end(), boxes.begin(), boxes.end());
        } else if (key == "message-id" && email.message_id.empty()) {
            auto id = trim(value);
            if (id.size() >= 2 && id.front() == '<' && id.back() == '>') id = trim(id.substr(1, id.size() - 2));
            email.message_id = id;
        } else if (key == "subject" && email.subject.empty()) {
            email.subject = value;
        } else if (key == "date" && !email.sent_date) {
            email.sent_date = parse_email_date(value);
        }
        auto [it, inserted] = email.headers.emplace(key, value);
        if (!inserted) it->second += ", " + value;
    }

    if (!from.empty()) email.sender = from.front().address;
    for (const auto* list : {&to, &cc})
        for (const auto& box : *list) push_unique(email.recipients, box.address);
    for (const auto* list : {&from, &to, &cc})
        for (const auto& box : *list) {
            push_unique(email.people, box.display_name);
            push_unique(email.people, box.address);
        }

    if (email.message_id.empty()) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(fnv1a64(raw.bytes)));
        email.message_id = buf;
    }

    if (blank < lines.size()) email.body = join_lines(lines, blank + 1, lines.size());
    return email;
}

std::vector<std::string> disentangle_thread(std::string_view body) {
    auto lines = split_lines(body);
    std::vector<std::vector<std::string>> units(1);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto& line = lines[i];
        if (std::regex_match(line, original_marker())) {
            units.emplace_back();
            continue;
        }
        if (std::regex_match(line, forward_marker())) {
            auto t = trim(line);
            bool framed = t.size() >= 2 && t.substr(t.size() - 2) == "--";
            if (!framed && i + 1 < lines.size() && is_dash_line(lines[i + 1])) {
                framed = true;
                ++i;
            }
            if (framed) {
                units.emplace_back();
                continue;
            }
        }
        units.back().push_back(line);
    }

    std::vector<std::string> out;
    for (const auto& unit : units) {
        auto text = finish_unit(unit);
        if (!text.empty()) out.push_back(std::move(text));
    }
    return out;
}

} // namespace evidex
