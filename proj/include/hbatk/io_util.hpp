#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hbatk {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

/// Parses a full-field double; throws ConfigError with `what` in the message.
double parse_double(std::string_view field, std::string_view what);

std::string read_text_file(const std::filesystem::path& path);

/// Writes to a sibling temporary file, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::vector<std::string_view> split_fields(std::string_view line, char sep = ',');

std::string_view trim(std::string_view s);

}  // namespace hbatk
