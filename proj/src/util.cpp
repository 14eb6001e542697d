#include "swarmskills/util.hpp"

#include "swarmskills/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

namespace fs = std::filesystem;

namespace swarmskills {

std::string trim(const std::string& s) {
    std::size_t begin = 0;
    std::size_t end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

std::string to_lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string normalize_text(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    bool in_space = false;
    for (unsigned char c : s) {
        if (std::isspace(c)) {
            in_space = true;
            continue;
        }
        if (in_space && !out.empty()) out.push_back(' ');
        in_space = false;
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t nl = text.find('\n', start);
        if (nl == std::string::npos) {
            if (start < text.size()) lines.push_back(text.substr(start));
            break;
        }
        lines.push_back(text.substr(start, nl - start));
        start = nl + 1;
    }
    return lines;
}

std::string read_text_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot read file", path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    if (in.bad()) throw ParseError("read failed", path.string());
    return buf.str();
}

void write_text_file(const fs::path& path, const std::string& content) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw ParseError("cannot write file", path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw ParseError("write failed", path.string());
}

std::vector<std::string> list_tree(const fs::path& dir, const std::vector<std::string>& skip_top) {
    std::vector<std::string> paths;
    if (!fs::exists(dir)) return paths;
    for (const auto& top : fs::directory_iterator(dir)) {
        const std::string base = top.path().filename().string();
        if (std::find(skip_top.begin(), skip_top.end(), base) != skip_top.end()) continue;
        if (top.is_regular_file()) {
            paths.push_back(base);
        } else if (top.is_directory()) {
            for (const auto& entry : fs::recursive_directory_iterator(top.path())) {
                if (!entry.is_regular_file()) continue;
                paths.push_back(fs::relative(entry.path(), dir).generic_string());
            }
        }
    }
    std::sort(paths.begin(), paths.end());
    return paths;
}

void copy_tree(const fs::path& from, const fs::path& to, const std::vector<std::string>& skip_top) {
    for (const auto& rel : list_tree(from, skip_top)) {
        write_text_file(to / rel, read_text_file(from / rel));
    }
}

void wipe_dir_except(const fs::path& dir, const std::vector<std::string>& keep_top) {
    if (!fs::exists(dir)) return;
    for (const auto& top : fs::directory_iterator(dir)) {
        const std::string base = top.path().filename().string();
        if (std::find(keep_top.begin(), keep_top.end(), base) != keep_top.end()) continue;
        fs::remove_all(top.path());
    }
}

} // namespace swarmskills
