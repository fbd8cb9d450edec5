#include "fewlabel/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "fewlabel/errors.hpp"
#include "fewlabel/rng.hpp"

namespace fewlabel {

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw DataError("failed reading file: " + path);
    return buf.str();
}

std::vector<std::string> read_lines(const std::string& path) {
    std::string content = read_text_file(path);
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start < content.size()) {
        std::size_t nl = content.find('\n', start);
        std::size_t end = (nl == std::string::npos) ? content.size() : nl;
        std::size_t len = end - start;
        if (len > 0 && content[end - 1] == '\r') --len;
        lines.emplace_back(content, start, len);
        if (nl == std::string::npos) break;
        start = nl + 1;
    }
    return lines;
}

void write_text_file(const std::string& path, const std::string& content) {
    namespace fs = std::filesystem;
    fs::path target(path);
    if (target.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(target.parent_path(), ec);
    }
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw DataError("cannot open file for writing: " + tmp.string());
        out.write(content.data(), static_cast<std::streamsize>(content.size()));
        out.flush();
        if (!out) {
            std::error_code ec;
            fs::remove(tmp, ec);
            throw DataError("failed writing file: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw DataError("failed moving " + tmp.string() + " into place: " + ec.message());
    }
}

std::string file_content_hash(const std::string& path) {
    std::uint64_t h = fnv1a64(read_text_file(path));
    char buf[32];
    std::snprintf(buf, sizeof buf, "fnv1a64:%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace fewlabel
