#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace qsatlink::textio {

/// Shortest decimal string that parses back to exactly the same double.
std::string format_exact(double v);

/// Fixed 9-significant-digit form used for derived report columns.
std::string format_g9(double v);

/// Fraction rendered as a percentage with 2 significant digits, e.g. "6.5%".
std::string format_percent(double fraction);

/// Strict double parse of a whole token. Throws ParseError with `line`.
double parse_double(std::string_view token, std::size_t line);

/// Strict non-negative integer parse. Throws ParseError with `line`.
std::uint64_t parse_uint(std::string_view token, std::size_t line);

std::string_view trim(std::string_view s);

std::vector<std::string_view> split(std::string_view line, char sep);

/// Whole file as lines; universal newline handling. Throws ParseError if the
/// file cannot be opened.
std::vector<std::string> read_lines(const std::string& path);

/// Writes via a temporary file in the same directory, then renames, so a
/// crash never leaves a half-written output behind.
void atomic_write(const std::string& path, const std::string& content);

}  // namespace qsatlink::textio
