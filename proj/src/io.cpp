// Copyright 2026 The lorenzlab Authors
// SPDX-License-Identifier: Apache-2.0
#include "lorenzlab/io.hpp"

#include "lorenzlab/errors.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include <unistd.h>

namespace lorenzlab::io {

std::string format_number(double value)
{
    if (std::isnan(value)) return "nan";
    if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
    std::array<char, 32> buf{};
    const auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc()) throw Error("format_number: conversion failed");
    return std::string(buf.data(), end);
}

double parse_number(std::string_view text)
{
    double value = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || end != text.data() + text.size()) {
        throw ValidationError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

Table::Table(std::string name, std::vector<std::string> header) : name_(std::move(name)), header_(std::move(header)) {}

void Table::add_row(std::vector<std::string> row)
{
    if (row.size() != header_.size()) throw Error("table " + name_ + ": row width does not match header");
    rows_.push_back(std::move(row));
}

std::size_t Table::column(std::string_view name) const
{
    for (std::size_t i = 0; i < header_.size(); ++i) {
        if (header_[i] == name) return i;
    }
    throw ValidationError("table " + name_ + ": no column '" + std::string(name) + "'");
}

std::vector<double> Table::numbers(std::string_view col) const
{
    const std::size_t c = column(col);
    std::vector<double> out;
    out.reserve(rows_.size());
    for (const auto& r : rows_) out.push_back(parse_number(r[c]));
    return out;
}

namespace {

void put_field(std::string& out, const std::string& field)
{
    if (field.find_first_of(",\"\r\n") == std::string::npos) {
        out += field;
        return;
    }
    out += '"';
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
}

void put_record(std::string& out, const std::vector<std::string>& record)
{
    for (std::size_t i = 0; i < record.size(); ++i) {
        if (i) out += ',';
        put_field(out, record[i]);
    }
    out += "\r\n";
}

} // namespace

std::string to_csv(const Table& table)
{
    std::string out;
    put_record(out, table.header());
    for (const auto& r : table.rows()) put_record(out, r);
    return out;
}

Table parse_csv(std::string name, std::string_view text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false, in_record = false;
    std::size_t i = 0;
    auto end_record = [&] {
        record.push_back(std::move(field));
        field.clear();
        records.push_back(std::move(record));
        record.clear();
        in_record = false;
    };
    while (i < text.size()) {
        const char c = text[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    i += 2;
                    continue;
                }
                quoted = false;
            }
            else {
                field += c;
            }
            ++i;
            continue;
        }
        in_record = true;
        if (c == '"' && field.empty()) {
            quoted = true;
        }
        else if (c == ',') {
            record.push_back(std::move(field));
            field.clear();
        }
        else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
            end_record();
            ++i;
        }
        else if (c == '\n') {
            end_record();
        }
        else {
            field += c;
        }
        ++i;
    }
    if (quoted) throw ValidationError("csv " + name + ": unterminated quoted field");
    if (in_record) end_record();
    if (records.empty()) throw ValidationError("csv " + name + ": missing header");
    Table table(std::move(name), records.front());
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header().size()) {
            throw ValidationError("csv " + table.name() + ": record " + std::to_string(r) + " has the wrong width");
        }
        table.add_row(std::move(records[r]));
    }
    return table;
}

void write_atomic(const std::filesystem::path& path, std::string_view content)
{
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open " + tmp.string() + " for writing");
        os.write(content.data(), static_cast<std::streamsize>(content.size()));
        os.flush();
        if (!os) {
            os.close();
            fs::remove(tmp);
            throw Error("write failed: " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw Error("rename to " + path.string() + " failed: " + ec.message());
    }
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is) throw Error("cannot open " + path.string());
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

} // namespace lorenzlab::io
