#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"

namespace attrikit {

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) raise(Errc::Io, "cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::filesystem::path p(path);
    if (p.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(p.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(Errc::Io, "cannot open '" + path + "' for writing");
    out << content;
    if (!out) raise(Errc::Io, "write to '" + path + "' failed");
}

// Shortest decimal form that round-trips back to the same double. Integral
// values come out without a decimal point ("36", not "36.0").
inline std::string format_double(double v) {
    char buf[32];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

inline uint64_t fnv1a64(std::string_view bytes, uint64_t h = 1469598103934665603ull) {
    for (char c : bytes) {
        h ^= static_cast<unsigned char>(c);
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string hex64(uint64_t v) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<size_t>(i)] = digits[v & 0xf];
        v >>= 4;
    }
    return out;
}

// Edit distance, used to suggest a replacement for a misspelled config key.
inline size_t levenshtein(std::string_view a, std::string_view b) {
    std::vector<size_t> p(b.size() + 1), c(b.size() + 1);
    for (size_t j = 0; j <= b.size(); ++j) p[j] = j;
    for (size_t i = 1; i <= a.size(); ++i) {
        c[0] = i;
        for (size_t j = 1; j <= b.size(); ++j) {
            size_t sub = p[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
            c[j] = std::min({p[j] + 1, c[j - 1] + 1, sub});
        }
        std::swap(p, c);
    }
    return p[b.size()];
}

} // namespace attrikit
