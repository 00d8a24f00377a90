#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pathloc {

std::vector<std::string> split(std::string_view text, char sep);

std::string_view trim(std::string_view text);

bool starts_with(std::string_view text, std::string_view prefix);
bool ends_with(std::string_view text, std::string_view suffix);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

std::string to_lower(std::string_view text);

// Strict decimal integer parse; throws SchemaError when out of [min, max]
// or not a plain integer.
int64_t parse_int(std::string_view text, int64_t min, int64_t max,
                  std::string_view what, int line = -1);

double parse_double(std::string_view text, std::string_view what, int line = -1);

// Reads a whole file; throws SchemaError when the file cannot be opened.
std::string read_file(const std::string& path);

void write_file(const std::string& path, std::string_view content);

}  // namespace pathloc
