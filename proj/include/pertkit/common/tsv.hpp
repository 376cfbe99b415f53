#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace pertkit {

// Minimal TSV table with a named header row. All pipeline file formats that
// are not JSONL go through this.
class TsvTable {
public:
    static TsvTable read_file(const std::string& path);
    static TsvTable parse(const std::string& text, const std::string& origin);

    const std::vector<std::string>& columns() const { return columns_; }
    size_t row_count() const { return rows_.size(); }

    // Column index, or throws InputError naming the file and column.
    size_t column_index(const std::string& name) const;
    bool has_column(const std::string& name) const;

    const std::string& cell(size_t row, size_t col) const { return rows_[row][col]; }
    const std::string& cell(size_t row, const std::string& col) const {
        return rows_[row][column_index(col)];
    }

    // Typed accessors. A cell that is empty, "NA" or "na" reads as nullopt.
    std::optional<double> cell_double(size_t row, const std::string& col) const;
    std::optional<long long> cell_int(size_t row, const std::string& col) const;

    std::string origin() const { return origin_; }

private:
    std::string origin_;
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

class TsvWriter {
public:
    explicit TsvWriter(std::vector<std::string> columns);

    void add_row(const std::vector<std::string>& cells);
    std::string str() const;
    void write_file(const std::string& path) const;

private:
    std::vector<std::string> columns_;
    std::vector<std::vector<std::string>> rows_;
};

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

// Appends one line; creates the file when missing.
void append_line(const std::string& path, const std::string& line);

std::string format_double(double v);

}  // namespace pertkit
