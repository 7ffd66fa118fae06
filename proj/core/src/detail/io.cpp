#include "detail/io.hpp"

#include "evidex/error.hpp"

#include <fstream>
#include <sstream>

namespace evidex::detail {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw Error(ErrorCode::Io, "cannot write '" + tmp.string() + "'");
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) throw Error(ErrorCode::Io, "short write to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

void for_each_line(const std::filesystem::path& path, const std::function<void(const std::string&)>& fn) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::NotFound, "cannot open '" + path.string() + "'");
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) fn(line);
    }
}

} // namespace evidex::detail
