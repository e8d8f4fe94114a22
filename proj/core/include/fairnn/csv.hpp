#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fairnn {

/// Shortest decimal text that parses back to exactly `v`.
std::string format_double(double v);
/// Empty-optional renders as "NA".
std::string format_optional(const std::optional<double>& v);
double parse_double(std::string_view text);

/// Joins fields with commas and a trailing newline.
std::string csv_row(const std::vector<std::string>& fields);
std::vector<std::string> split_csv_line(std::string_view line);

/// 64-bit FNV-1a over bytes; used for cache/manifest checksums.
std::uint64_t fnv1a64(std::string_view bytes);
std::uint64_t file_checksum(const std::filesystem::path& path);
std::string hex64(std::uint64_t v);

std::string read_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: to a temp sibling, then rename.
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace fairnn
