#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "hpfnav/errors.hpp"

namespace hpfnav {

/// Decimal formatting with 17 significant digits; round-trips doubles exactly
/// and is stable across runs, so repeated exports are byte-identical.
inline std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    out << content;
    if (!out) throw Error("write failed: " + path);
}

inline std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open for reading: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace hpfnav
