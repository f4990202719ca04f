#include "psylex/csv.hpp"

#include <fstream>
#include <sstream>

#include "psylex/errors.hpp"

namespace psylex::csv {

int Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

Table parse(const std::string& text, const std::string& origin) {
    std::vector<Record> records;
    Record current;
    std::string field;
    bool in_quotes = false;
    bool record_started = false;
    std::size_t line = 1;
    current.line = 1;

    auto end_field = [&] {
        current.fields.push_back(field);
        field.clear();
    };
    auto end_record = [&] {
        end_field();
        records.push_back(std::move(current));
        current = Record{};
        current.line = line;
        record_started = false;
    };

    for (std::size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                in_quotes = true;
                record_started = true;
                break;
            case ',':
                end_field();
                record_started = true;
                break;
            case '\r':
                break;
            case '\n':
                ++line;
                if (record_started || !field.empty() || !current.fields.empty()) {
                    end_record();
                } else {
                    current.line = line;  // skip blank line
                }
                break;
            default:
                field.push_back(c);
                record_started = true;
                break;
        }
    }
    if (in_quotes) {
        throw ParseError(origin + ": unterminated quoted field at end of file");
    }
    if (record_started || !field.empty() || !current.fields.empty()) {
        end_record();
    }

    Table table;
    if (!records.empty()) {
        table.header = records.front().fields;
        table.rows.assign(records.begin() + 1, records.end());
    }
    return table;
}

Table read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ValidationError("cannot open file: " + path.string());
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), path.string());
}

std::string escape_field(const std::string& field) {
    bool need_quotes = field.find_first_of(",\"\n\r") != std::string::npos;
    if (!need_quotes) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out.push_back(c);
    }
    out += '"';
    return out;
}

std::string join_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out.push_back(',');
        out += escape_field(fields[i]);
    }
    return out;
}

void write_file(const std::filesystem::path& path,
                const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw ValidationError("cannot write file: " + path.string());
    }
    out << join_row(header) << '\n';
    for (const auto& row : rows) {
        out << join_row(row) << '\n';
    }
}

}  // namespace psylex::csv
