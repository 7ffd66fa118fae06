#pragma once

#include <filesystem>
#include <functional>
#include <string>

namespace evidex::detail {

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temp file and renames over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);
void for_each_line(const std::filesystem::path& path, const std::function<void(const std::string&)>& fn);

} // namespace evidex::detail
