#include "affect/csv.hpp"

#include "affect/core.hpp"

namespace affect::csv {

std::vector<Record> parse(std::string_view content, const std::string& origin) {
    std::vector<Record> records;
    std::size_t line = 1;
    std::size_t i = 0;
    const std::size_t n = content.size();

    while (i < n) {
        Record rec;
        rec.line = line;
        std::string field;
        bool end_of_record = false;
        bool quoted = false;
        while (!end_of_record) {
            field.clear();
            if (i < n && content[i] == '"') {
                ++i;
                quoted = true;
                bool closed = false;
                while (i < n) {
                    const char c = content[i];
                    if (c == '"') {
                        if (i + 1 < n && content[i + 1] == '"') {
                            field += '"';
                            i += 2;
                            continue;
                        }
                        ++i;
                        closed = true;
                        break;
                    }
                    if (c == '\n') ++line;
                    field += c;
                    ++i;
                }
                if (!closed) throw ParseError(origin, rec.line, "unterminated quoted field");
                if (i < n && content[i] != ',' && content[i] != '\n' && content[i] != '\r') {
                    throw ParseError(origin, line, "unexpected text after closing quote");
                }
            } else {
                while (i < n && content[i] != ',' && content[i] != '\n' && content[i] != '\r') {
                    if (content[i] == '"') throw ParseError(origin, line, "quote inside unquoted field");
                    field += content[i++];
                }
            }
            rec.fields.push_back(field);
            if (i >= n) {
                end_of_record = true;
            } else if (content[i] == ',') {
                ++i;
            } else {
                if (content[i] == '\r') ++i;
                if (i < n && content[i] == '\n') ++i;
                ++line;
                end_of_record = true;
            }
        }
        // Blank lines carry no record.
        if (quoted || !(rec.fields.size() == 1 && rec.fields[0].empty())) records.push_back(std::move(rec));
    }
    return records;
}

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n ") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_row(const std::vector<std::string>& fields) {
    // A lone empty field is quoted so the row is not read back as a blank line.
    if (fields.size() == 1 && fields[0].empty()) return "\"\"\n";
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += escape(fields[i]);
    }
    out += '\n';
    return out;
}

}  // namespace affect::csv
