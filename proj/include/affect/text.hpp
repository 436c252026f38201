// Small string helpers shared by the file-format readers and writers.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace affect::text {

std::string_view trim(std::string_view s);
std::string to_lower(std::string_view s);
std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

/// Lowercases, trims, and collapses internal whitespace runs to one space.
std::string normalize_phrase(std::string_view s);

/// Whole-string parses; nullopt on any trailing garbage.
std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<double> parse_double(std::string_view s);

/// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

/// Fixed-point with `digits` decimals, for human-facing reports.
std::string format_fixed(double v, int digits);

/// Identifier usable as a single path component: [A-Za-z0-9._-]+, not "." or "..".
bool is_safe_id(std::string_view s);

/// YYYY-MM-DD with a plausible month and day.
bool is_iso_date(std::string_view s);

}  // namespace affect::text
