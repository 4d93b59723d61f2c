#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace hwassure {

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, std::string_view text);

std::vector<std::string> split_csv_line(std::string_view line);
/// Non-empty, non-comment lines split on commas, whitespace trimmed.
std::vector<std::vector<std::string>> parse_csv(std::string_view text);

std::size_t parse_count(const std::string& field, std::size_t line);
double parse_number(const std::string& field, std::size_t line);

/// Shortest round-trip decimal form.
std::string format_double(double value);

}  // namespace hwassure
