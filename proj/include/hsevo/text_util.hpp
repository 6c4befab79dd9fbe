#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace hsevo {

std::uint64_t fnv1a64(std::string_view data, std::uint64_t seed = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t value);

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);
// Like format_double but always reads back as a Python float literal.
std::string python_float_literal(double value);

std::string_view trim(std::string_view text);
std::vector<std::string_view> split_lines(std::string_view text);
std::size_t word_count(std::string_view text);

std::string read_file(const std::filesystem::path& path);
// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Replaces every `{name}` placeholder with its value. Values are inserted
// verbatim and never rescanned. Unknown placeholders throw std::out_of_range.
std::string render_template(std::string_view tmpl,
                            const std::vector<std::pair<std::string, std::string>>& values);

}  // namespace hsevo
