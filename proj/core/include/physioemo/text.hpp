#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace physioemo::text {

/// Shortest decimal form that parses back to the same double.
std::string format_double(double value);

/// Fixed-point form with `decimals` digits after the point.
std::string format_fixed(double value, int decimals);

/// Strict parse: the whole (trimmed) field must be a number. Accepts "nan".
std::optional<double> parse_double(std::string_view field);

std::string_view trim(std::string_view s);

std::vector<std::string_view> split(std::string_view s, char sep);

/// Reads a whole file; throws Error{Io} when it cannot be opened.
std::string read_file(const std::string& path);

void write_file(const std::string& path, std::string_view contents);

/// Parses `key = value` lines; '#' starts a comment. Later keys override.
std::vector<std::pair<std::string, std::string>> parse_key_values(
    std::string_view contents);

}  // namespace physioemo::text
