#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace evidex::detail {

/// Decodes UTF-8; bytes that do not start a valid sequence are taken as
/// Latin-1 code points.
std::u32string decode_utf8_lenient(std::string_view bytes);
void append_utf8(std::string& out, char32_t cp);
std::string encode_utf8(std::u32string_view cps);

char32_t to_lower(char32_t cp) noexcept;
bool is_alnum(char32_t cp) noexcept;
bool is_space(char32_t cp) noexcept;

} // namespace evidex::detail
