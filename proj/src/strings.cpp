#include "pathloc/strings.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "pathloc/error.hpp"

namespace pathloc {

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.emplace_back(text.substr(start));
            return out;
        }
        out.emplace_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view trim(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    return text;
}

bool starts_with(std::string_view text, std::string_view prefix) {
    return text.size() >= prefix.size() && text.substr(0, prefix.size()) == prefix;
}

bool ends_with(std::string_view text, std::string_view suffix) {
    return text.size() >= suffix.size() && text.substr(text.size() - suffix.size()) == suffix;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += sep;
        out += parts[i];
    }
    return out;
}

std::string to_lower(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return out;
}

int64_t parse_int(std::string_view text, int64_t min, int64_t max,
                  std::string_view what, int line) {
    text = trim(text);
    if (text.empty()) throw schema_error(std::string(what) + ": empty integer field", line);
    size_t i = text[0] == '-' ? 1 : 0;
    if (i == text.size()) throw schema_error(std::string(what) + ": not an integer", line);
    for (size_t k = i; k < text.size(); ++k)
        if (!std::isdigit(static_cast<unsigned char>(text[k])))
            throw schema_error(std::string(what) + ": not an integer: '" + std::string(text) + "'", line);
    errno = 0;
    char* end = nullptr;
    std::string buf(text);
    long long v = std::strtoll(buf.c_str(), &end, 10);
    if (errno == ERANGE || end != buf.c_str() + buf.size())
        throw schema_error(std::string(what) + ": integer out of range: '" + buf + "'", line);
    if (v < min || v > max)
        throw schema_error(std::string(what) + ": value " + std::to_string(v) + " outside [" +
                               std::to_string(min) + ", " + std::to_string(max) + "]",
                           line);
    return v;
}

double parse_double(std::string_view text, std::string_view what, int line) {
    text = trim(text);
    if (text.empty()) throw schema_error(std::string(what) + ": empty numeric field", line);
    std::string buf(text);
    errno = 0;
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size() || errno == ERANGE || !std::isfinite(v))
        throw schema_error(std::string(what) + ": not a finite number: '" + buf + "'", line);
    return v;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw schema_error("cannot open file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw schema_error("cannot write file: " + path);
    out << content;
    if (!out) throw schema_error("write failed: " + path);
}

}  // namespace pathloc
