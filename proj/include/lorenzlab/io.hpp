// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <type_traits>
#include <vector>

namespace lorenzlab::io {

/// Shortest decimal that round-trips to the same double.
std::string format_number(double value);

/// Inverse of format_number; throws ValidationError on malformed input.
double parse_number(std::string_view text);

/// A named table of text cells with a header row.
class Table {
public:
    Table() = default;
    Table(std::string name, std::vector<std::string> header);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    /// Appends one row; the cell count must match the header.
    template <class... Cells>
    void add(const Cells&... cells)
    {
        add_row({cell(cells)...});
    }
    void add_row(std::vector<std::string> row);

    /// Index of a header column; throws ValidationError when absent.
    std::size_t column(std::string_view name) const;

    const std::string& text(std::size_t row, std::string_view col) const { return rows_[row][column(col)]; }
    double number(std::size_t row, std::string_view col) const { return parse_number(text(row, col)); }
    std::vector<double> numbers(std::string_view col) const;

private:
    static std::string cell(const std::string& s) { return s; }
    static std::string cell(const char* s) { return s; }
    static std::string cell(std::string_view s) { return std::string(s); }
    static std::string cell(bool b) { return b ? "true" : "false"; }
    static std::string cell(double v) { return format_number(v); }
    template <class T>
        requires std::is_integral_v<T>
    static std::string cell(T v)
    {
        return std::to_string(v);
    }

    std::string name_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

/// RFC 4180: CRLF line ends; fields holding a comma, quote, CR or LF are
/// quoted with inner quotes doubled.
std::string to_csv(const Table& table);

/// Parses RFC 4180 text; the first record is the header.
Table parse_csv(std::string name, std::string_view text);

/// Writes to a temporary file in the same directory, flushes, then renames
/// over the target, so readers never see a partial file.
void write_atomic(const std::filesystem::path& path, std::string_view content);

std::string read_file(const std::filesystem::path& path);

} // namespace lorenzlab::io
