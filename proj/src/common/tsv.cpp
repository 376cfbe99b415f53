#include "pertkit/common/tsv.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "pertkit/common/errors.hpp"

namespace pertkit {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
    std::vector<std::string> out;
    size_t start = 0;
    while (true) {
        size_t pos = line.find('\t', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

bool is_na(const std::string& s) {
    return s.empty() || s == "NA" || s == "na" || s == "NaN";
}

}  // namespace

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw InputError("cannot open file: " + path);
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw InputError("cannot write file: " + path);
    }
    out << content;
    if (!out) {
        throw InputError("short write: " + path);
    }
}

void append_line(const std::string& path, const std::string& line) {
    std::ofstream out(path, std::ios::binary | std::ios::app);
    if (!out) {
        throw InputError("cannot append to file: " + path);
    }
    out << line << '\n';
}

TsvTable TsvTable::read_file(const std::string& path) {
    return parse(read_text_file(path), path);
}

TsvTable TsvTable::parse(const std::string& text, const std::string& origin) {
    TsvTable t;
    t.origin_ = origin;
    std::istringstream in(text);
    std::string line;
    bool have_header = false;
    size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (line.empty()) {
            continue;
        }
        auto cells = split_tabs(line);
        if (!have_header) {
            t.columns_ = cells;
            have_header = true;
            continue;
        }
        if (cells.size() != t.columns_.size()) {
            throw InputError(origin + ":" + std::to_string(lineno) + ": expected " +
                             std::to_string(t.columns_.size()) + " columns, got " +
                             std::to_string(cells.size()));
        }
        t.rows_.push_back(std::move(cells));
    }
    if (!have_header) {
        throw InputError(origin + ": missing header row");
    }
    return t;
}

size_t TsvTable::column_index(const std::string& name) const {
    auto it = std::find(columns_.begin(), columns_.end(), name);
    if (it == columns_.end()) {
        throw InputError(origin_ + ": missing column '" + name + "'");
    }
    return static_cast<size_t>(it - columns_.begin());
}

bool TsvTable::has_column(const std::string& name) const {
    return std::find(columns_.begin(), columns_.end(), name) != columns_.end();
}

std::optional<double> TsvTable::cell_double(size_t row, const std::string& col) const {
    const std::string& s = cell(row, col);
    if (is_na(s)) {
        return std::nullopt;
    }
    double v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InputError(origin_ + ": row " + std::to_string(row + 1) + ", column '" + col +
                         "': not a number: '" + s + "'");
    }
    return v;
}

std::optional<long long> TsvTable::cell_int(size_t row, const std::string& col) const {
    const std::string& s = cell(row, col);
    if (is_na(s)) {
        return std::nullopt;
    }
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        throw InputError(origin_ + ": row " + std::to_string(row + 1) + ", column '" + col +
                         "': not an integer: '" + s + "'");
    }
    return v;
}

TsvWriter::TsvWriter(std::vector<std::string> columns) : columns_(std::move(columns)) {}

void TsvWriter::add_row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) {
        throw InputError("TsvWriter: row width mismatch");
    }
    rows_.push_back(cells);
}

std::string TsvWriter::str() const {
    std::ostringstream out;
    for (size_t i = 0; i < columns_.size(); ++i) {
        out << (i ? "\t" : "") << columns_[i];
    }
    out << '\n';
    for (const auto& row : rows_) {
        for (size_t i = 0; i < row.size(); ++i) {
            out << (i ? "\t" : "") << row[i];
        }
        out << '\n';
    }
    return out.str();
}

void TsvWriter::write_file(const std::string& path) const {
    write_text_file(path, str());
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace pertkit
