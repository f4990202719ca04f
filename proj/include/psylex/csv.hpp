#pragma once

#include <filesystem>
#include <string>
#include <vector>

namespace psylex::csv {

struct Record {
    std::size_t line = 0;  // 1-based line where the record starts
    std::vector<std::string> fields;
};

struct Table {
    std::vector<std::string> header;
    std::vector<Record> rows;

    // Index of a header column, or -1.
    int column(const std::string& name) const;
};

// RFC-4180-ish reader: quoted fields may contain commas, doubled quotes and
// newlines. First record is the header.
Table read_file(const std::filesystem::path& path);
Table parse(const std::string& text, const std::string& origin = "<string>");

std::string escape_field(const std::string& field);
std::string join_row(const std::vector<std::string>& fields);

// Serializes header + rows with '\n' endings; byte-deterministic.
void write_file(const std::filesystem::path& path,
                const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows);

}  // namespace psylex::csv
