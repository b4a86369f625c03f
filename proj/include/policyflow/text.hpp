#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace policyflow {

std::string trim(std::string_view s);

// Collapses every internal whitespace run (space, tab, newline, CR) to one
// space and trims both ends.
std::string collapse_whitespace(std::string_view s);

std::string to_lower(std::string_view s);

bool iequals(std::string_view a, std::string_view b);

bool contains_ci(std::string_view haystack, std::string_view needle);

std::vector<std::string> split(std::string_view s, char sep);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// Lowercase alphanumeric token runs; everything else separates.
std::vector<std::string> word_tokens(std::string_view s);

std::uint64_t fnv1a64(std::string_view s);

std::string sha256_hex(std::string_view s);

// Heuristic singular form of one English token. Covers the plural shapes
// that occur in policy text; irregulars go through a small exception map.
std::string singularize_token(std::string_view token);

// Escapes \, tab and newline for the one-record-per-line text encoding.
std::string escape_field(std::string_view s);
std::string unescape_field(std::string_view s);

std::string format_fixed(double value, int decimals);

std::string read_file(const std::filesystem::path& path);

// Writes via a sibling temp file + rename so readers never see a torn file.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

}  // namespace policyflow
