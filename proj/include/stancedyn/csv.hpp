#pragma once

#include <charconv>
#include <cstdio>
#include <istream>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "stancedyn/error.hpp"

namespace stancedyn::csv {

/// Splits one CSV line into fields. Double-quoted fields may contain commas
/// and doubled quotes; embedded newlines are not supported.
inline std::vector<std::string> split(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur.push_back('"');
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

inline std::string quote(std::string_view field) {
    if (field.find_first_of(",\"\n") == std::string_view::npos) return std::string{field};
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out.push_back('"');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

/// Shortest round-trip representation, so CSV output is stable across runs.
inline std::string num(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

inline double to_double(const std::string& s, std::string_view what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError("invalid number for " + std::string(what) + ": '" + s + "'");
    return v;
}

inline long long to_int(const std::string& s, std::string_view what) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size())
        throw DataError("invalid integer for " + std::string(what) + ": '" + s + "'");
    return v;
}

/// Reads a header line and checks it matches `expected` exactly.
inline void expect_header(std::istream& in, std::string_view expected, std::string_view file_kind) {
    std::string line;
    if (!std::getline(in, line)) throw DataError(std::string(file_kind) + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != expected)
        throw DataError(std::string(file_kind) + ": expected header '" + std::string(expected) + "', got '" +
                        line + "'");
}

} // namespace stancedyn::csv
