#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gaitemo {

/// Shortest decimal representation that parses back to the same double.
std::string format_double(double v);

/// Strict full-string double parse; nullopt on any trailing garbage.
std::optional<double> parse_double(std::string_view s);

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace gaitemo
