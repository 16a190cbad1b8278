// emit.hpp - CSV / JSON result files.
//
// Grids are written long-form, one record per (tau, fd) point with fd as the
// inner loop. Doubles are printed with 17 significant digits so they read
// back bit-exactly.

#pragma once

#include "otfsaf/ambiguity.hpp"
#include "otfsaf/common.hpp"

#include <json.hpp>

#include <cerrno>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace otfsaf {

using Json = nlohmann::json;
using Cell = std::variant<double, std::int64_t, std::string>;

struct ResultTable {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size()) throw DimensionMismatch("row width does not match the header");
        rows.push_back(std::move(row));
    }
};

/// A result set: config echo, a table and free-form scalar summary.
struct ResultDocument {
    Json config = Json::object();
    ResultTable table;
    Json summary = Json::object();
};

enum class OutputFormat { Csv, Json };

inline OutputFormat parse_output_format(const std::string& s) {
    if (s == "csv") return OutputFormat::Csv;
    if (s == "json") return OutputFormat::Json;
    throw std::invalid_argument("unknown output format '" + s + "' (expected csv or json)");
}

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline double cell_as_double(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c)) return *d;
    if (const auto* i = std::get_if<std::int64_t>(&c)) return static_cast<double>(*i);
    throw std::invalid_argument("cell is not numeric");
}

inline void write_csv(const ResultTable& table, std::ostream& os) {
    for (std::size_t i = 0; i < table.columns.size(); ++i) os << (i ? "," : "") << table.columns[i];
    os << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) os << ',';
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) {
                        os << format_double(v);
                    } else {
                        os << v;
                    }
                },
                row[i]);
        }
        os << '\n';
    }
}

/// Reads a table written by write_csv. Numeric fields come back as double,
/// everything else as string.
inline ResultTable read_csv(std::istream& is) {
    auto split = [](const std::string& line) {
        std::vector<std::string> out;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) out.push_back(field);
        if (!line.empty() && line.back() == ',') out.emplace_back();
        return out;
    };
    ResultTable table;
    std::string line;
    if (!std::getline(is, line)) throw IoError("empty CSV input");
    table.columns = split(line);
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::vector<Cell> row;
        for (const auto& f : split(line)) {
            char* end = nullptr;
            errno = 0;
            const double v = std::strtod(f.c_str(), &end);
            if (!f.empty() && end == f.c_str() + f.size()) {
                row.emplace_back(v);
            } else {
                row.emplace_back(f);
            }
        }
        table.add_row(std::move(row));
    }
    return table;
}

inline Json to_json(const ResultDocument& doc) {
    Json rows = Json::array();
    for (const auto& row : doc.table.rows) {
        Json r = Json::array();
        for (const auto& c : row) std::visit([&](const auto& v) { r.push_back(v); }, c);
        rows.push_back(std::move(r));
    }
    Json results = {{"columns", doc.table.columns}, {"rows", std::move(rows)}};
    if (!doc.summary.empty()) results["summary"] = doc.summary;
    return {{"config", doc.config}, {"results", std::move(results)}};
}

inline void emit(const ResultDocument& doc, std::ostream& os, OutputFormat format) {
    if (format == OutputFormat::Csv) {
        write_csv(doc.table, os);
    } else {
        os << to_json(doc).dump(2) << '\n';
    }
}

inline void emit(const ResultDocument& doc, const std::string& path, OutputFormat format) {
    std::ofstream os(path, std::ios::out | std::ios::trunc);
    if (!os) throw IoError("cannot open '" + path + "' for writing");
    emit(doc, os, format);
    os.flush();
    if (!os) throw IoError("failed writing '" + path + "'");
}

/// Long-form table of named real surfaces over axes: columns tau, fd, names...
inline ResultTable grid_table(const AfAxes& axes, const std::vector<std::pair<std::string, const RealMatrix*>>& surfaces) {
    ResultTable t;
    t.columns = {"tau", "fd"};
    for (const auto& [name, m] : surfaces) {
        if (m->rows() != axes.tau_values.size() || m->cols() != axes.fd_values.size()) {
            throw DimensionMismatch("surface '" + name + "' does not match the axes");
        }
        t.columns.push_back(name);
    }
    for (std::size_t i = 0; i < axes.tau_values.size(); ++i) {
        for (std::size_t j = 0; j < axes.fd_values.size(); ++j) {
            std::vector<Cell> row{axes.tau_values[i], axes.fd_values[j]};
            for (const auto& s : surfaces) row.emplace_back((*s.second)(i, j));
            t.rows.push_back(std::move(row));
        }
    }
    return t;
}

}  // namespace otfsaf
