#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "splitrec/types.hpp"

namespace splitrec {

using ordered_json = nlohmann::ordered_json;

/// Shortest decimal representation that round-trips a double (17
/// significant digits).
inline std::string format_number(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

/// CSV for a complex series: header `k,re,im,abs,phase_rad`, one row per
/// node, LF line endings.
inline std::string complex_series_csv(const GridFunction& y) {
    if (y.values().empty())
        throw EmptySeries("empty series");
    std::string out = "k,re,im,abs,phase_rad\n";
    long k = y.first_index();
    for (const cx& v : y.values()) {
        out += std::to_string(k++);
        out += ',';
        out += format_number(v.real());
        out += ',';
        out += format_number(v.imag());
        out += ',';
        out += format_number(std::abs(v));
        out += ',';
        out += format_number(std::arg(v));
        out += '\n';
    }
    return out;
}

/// CSV for a real series: header `k,value`.
inline std::string real_series_csv(long first_index, const std::vector<double>& values) {
    if (values.empty())
        throw EmptySeries("empty series");
    std::string out = "k,value\n";
    long k = first_index;
    for (double v : values) {
        out += std::to_string(k++);
        out += ',';
        out += format_number(v);
        out += '\n';
    }
    return out;
}

/// CSV with one real column per named series (shared index column).
inline std::string real_table_csv(long first_index,
                                  const std::vector<std::pair<std::string,
                                                              std::vector<double>>>& columns) {
    if (columns.empty() || columns.front().second.empty())
        throw EmptySeries("empty series");
    const std::size_t n = columns.front().second.size();
    std::string out = "k";
    for (const auto& [name, values] : columns) {
        if (values.size() != n)
            throw Error("real_table_csv: column length mismatch");
        out += ',';
        out += name;
    }
    out += '\n';
    for (std::size_t i = 0; i < n; ++i) {
        out += std::to_string(first_index + static_cast<long>(i));
        for (const auto& column : columns) {
            out += ',';
            out += format_number(column.second[i]);
        }
        out += '\n';
    }
    return out;
}

inline ordered_json complex_to_json(cx v) {
    return ordered_json{{"re", v.real()}, {"im", v.imag()}, {"abs", std::abs(v)},
                        {"phase_rad", std::arg(v)}};
}

inline ordered_json complex_series_json(const GridFunction& y) {
    if (y.values().empty())
        throw EmptySeries("empty series");
    ordered_json arr = ordered_json::array();
    long k = y.first_index();
    for (const cx& v : y.values()) {
        ordered_json item = complex_to_json(v);
        item["k"] = k++;
        arr.push_back(std::move(item));
    }
    return arr;
}

/// Writes `content` to `path` (or stdout when path is empty or "-").
inline void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::fwrite(content.data(), 1, content.size(), stdout);
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot open output file: " + path);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw Error("write failed: " + path);
}

}  // namespace splitrec
