#pragma once

// Result tables and their CSV / JSON writers.
//
// CSV layout: a block of `# ` lines (command, extra metadata, the resolved
// scenario as indented JSON), one header row, then data rows. Reals are
// printed with 17 significant digits. Nothing time- or host-dependent is
// written, so equal inputs give byte-identical files.

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "nads/scenario.hpp"

namespace nads {

using Cell = std::variant<double, std::string>;

struct Table {
    std::string command;
    std::vector<std::pair<std::string, std::string>> meta;  // extra `# key: value` lines
    Json scenario;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    std::size_t column(const std::string& name) const
    {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name) return i;
        throw ValidationError("column", "no column named " + name);
    }

    double number(std::size_t row, const std::string& name) const
    {
        return std::get<double>(rows.at(row).at(column(name)));
    }
};

inline std::string format_real(double x)
{
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x == 0.0 ? 0.0 : x);  // fold -0 into 0
    return buf;
}

inline std::string csv_quote(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c == '\n' ? ' ' : c;
    }
    return out + "\"";
}

inline void write_csv(std::ostream& out, const Table& t)
{
    out << "# nads " << t.command << "\n";
    for (const auto& [k, v] : t.meta) out << "# " << k << ": " << v << "\n";
    if (!t.scenario.is_null()) {
        out << "# scenario:\n";
        std::istringstream lines(t.scenario.dump(2));
        for (std::string line; std::getline(lines, line);) out << "#   " << line << "\n";
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ',';
            if (const auto* d = std::get_if<double>(&row[i]))
                out << format_real(*d);
            else
                out << csv_quote(std::get<std::string>(row[i]));
        }
        out << "\n";
    }
}

/// Same content as the CSV. Reals are emitted as 17-digit literals; values
/// JSON cannot represent (nan, inf) become null.
inline void write_json(std::ostream& out, const Table& t)
{
    Json head;
    head["command"] = t.command;
    Json meta = Json::object();
    for (const auto& [k, v] : t.meta) meta[k] = v;
    head["meta"] = meta;
    head["scenario"] = t.scenario;
    head["columns"] = t.columns;
    std::string text = head.dump(2);
    text.erase(text.size() - 2);  // drop "\n}" to append rows by hand
    out << text << ",\n  \"rows\": [";
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
        out << (r ? ",\n    [" : "\n    [");
        const auto& row = t.rows[r];
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (i) out << ", ";
            if (const auto* d = std::get_if<double>(&row[i]))
                out << (std::isfinite(*d) ? format_real(*d) : "null");
            else
                out << Json(std::get<std::string>(row[i])).dump();
        }
        out << "]";
    }
    out << (t.rows.empty() ? "]\n}\n" : "\n  ]\n}\n");
}

}  // namespace nads
