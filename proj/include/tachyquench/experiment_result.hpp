#pragma once
//
// Tabular experiment output: header + rows, with CSV and JSON-records writers.
// Floating-point cells are written with 17 significant digits.
//

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace tachyquench {

using Cell = std::variant<double, std::int64_t, std::string>;

struct Check {
    std::string name;
    bool passed;
    std::string detail;
};

struct ExperimentResult {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
    std::vector<std::pair<std::string, Cell>> summary;
    std::vector<Check> checks;
    std::vector<std::string> warnings;

    ExperimentResult() = default;
    explicit ExperimentResult(std::vector<std::string> cols) : columns(std::move(cols)) {}

    void add_row(std::vector<Cell> row) {
        if (row.size() != columns.size())
            throw std::logic_error("ExperimentResult: row width does not match header");
        rows.push_back(std::move(row));
    }

    void note(std::string key, Cell value) { summary.emplace_back(std::move(key), std::move(value)); }

    void check(std::string name, bool passed, std::string detail = {}) {
        checks.push_back({std::move(name), passed, std::move(detail)});
    }

    bool all_passed() const {
        for (const auto& c : checks)
            if (!c.passed)
                return false;
        return true;
    }

    std::size_t column_index(const std::string& name) const {
        for (std::size_t i = 0; i < columns.size(); ++i)
            if (columns[i] == name)
                return i;
        throw std::out_of_range("no column " + name);
    }

    double number(std::size_t row, const std::string& col) const {
        const auto& c = rows.at(row).at(column_index(col));
        if (const auto* d = std::get_if<double>(&c))
            return *d;
        if (const auto* i = std::get_if<std::int64_t>(&c))
            return static_cast<double>(*i);
        throw std::invalid_argument("column " + col + " is not numeric");
    }

    void append(const ExperimentResult& other) {
        if (other.columns != columns)
            throw std::logic_error("ExperimentResult: appending incompatible table");
        rows.insert(rows.end(), other.rows.begin(), other.rows.end());
        summary.insert(summary.end(), other.summary.begin(), other.summary.end());
        checks.insert(checks.end(), other.checks.begin(), other.checks.end());
        warnings.insert(warnings.end(), other.warnings.begin(), other.warnings.end());
    }
};

inline std::string format_number(double v) {
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace detail {

inline std::string csv_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c))
        return format_number(*d);
    if (const auto* i = std::get_if<std::int64_t>(&c))
        return std::to_string(*i);
    const auto& s = std::get<std::string>(c);
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char ch : s) {
        if (ch == '"')
            q += '"';
        q += ch;
    }
    return q + "\"";
}

inline std::string json_string(const std::string& s) {
    std::string out = "\"";
    for (char ch : s) {
        switch (ch) {
        case '"':
            out += "\\\"";
            break;
        case '\\':
            out += "\\\\";
            break;
        case '\n':
            out += "\\n";
            break;
        default:
            out += ch;
        }
    }
    return out + "\"";
}

inline std::string json_cell(const Cell& c) {
    if (const auto* d = std::get_if<double>(&c))
        return std::isfinite(*d) ? format_number(*d) : "null";
    if (const auto* i = std::get_if<std::int64_t>(&c))
        return std::to_string(*i);
    return json_string(std::get<std::string>(c));
}

} // namespace detail

inline void write_csv(std::ostream& os, const ExperimentResult& r) {
    for (std::size_t i = 0; i < r.columns.size(); ++i)
        os << (i ? "," : "") << r.columns[i];
    os << '\n';
    for (const auto& row : r.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << (i ? "," : "") << detail::csv_cell(row[i]);
        os << '\n';
    }
}

/// JSON array of records, one object per row; non-finite numbers become null.
inline void write_json(std::ostream& os, const ExperimentResult& r) {
    os << "[";
    for (std::size_t k = 0; k < r.rows.size(); ++k) {
        os << (k ? ",\n " : "\n ") << "{";
        for (std::size_t i = 0; i < r.columns.size(); ++i)
            os << (i ? ", " : "") << detail::json_string(r.columns[i]) << ": " << detail::json_cell(r.rows[k][i]);
        os << "}";
    }
    os << (r.rows.empty() ? "]\n" : "\n]\n");
}

inline void write_summary(std::ostream& os, const ExperimentResult& r) {
    for (const auto& [key, value] : r.summary)
        os << key << " = " << detail::csv_cell(value) << '\n';
    for (const auto& w : r.warnings)
        os << "warning: " << w << '\n';
    for (const auto& c : r.checks)
        os << (c.passed ? "[PASS] " : "[FAIL] ") << c.name << (c.detail.empty() ? "" : " -- ") << c.detail << '\n';
}

} // namespace tachyquench
