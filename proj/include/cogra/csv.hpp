#pragma once

#include <cstdio>
#include <fstream>
#include <string>
#include <vector>

#include "cogra/errors.hpp"

namespace cogra {

/// Fixed CSV float format: 12 significant digits, so equal inputs give
/// byte-identical files.
inline std::string csv_num(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

inline std::string csv_num(long v) { return std::to_string(v); }
inline std::string csv_num(int v) { return std::to_string(v); }

class CsvFile {
public:
    CsvFile(const std::string& path, const std::vector<std::string>& header)
        : out_(path) {
        if (!out_) throw ConfigError("cannot open output file: " + path);
        row(header);
    }

    void row(const std::vector<std::string>& fields) {
        for (size_t i = 0; i < fields.size(); ++i) {
            if (i) out_ << ',';
            out_ << fields[i];
        }
        out_ << '\n';
    }

private:
    std::ofstream out_;
};

}  // namespace cogra
