// RFC-4180 style CSV reading and writing.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace affect::csv {

struct Record {
    std::size_t line = 0;  // 1-based line where the record starts
    std::vector<std::string> fields;
};

/// Splits `content` into records. Quoted fields may contain commas, doubled
/// quotes, and line breaks. Throws ParseError(origin, line, ...) on an
/// unterminated quote or stray text after a closing quote.
std::vector<Record> parse(std::string_view content, const std::string& origin);

/// Quotes a field when it holds a comma, quote, line break, or space.
std::string escape(std::string_view field);

std::string format_row(const std::vector<std::string>& fields);

}  // namespace affect::csv
