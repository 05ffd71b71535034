#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace nora::text {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);

/// Lowercases, folds typographic apostrophes to ASCII and collapses runs of
/// whitespace to one space.
std::string normalize(std::string_view s);

/// Splits normalized text on whitespace and strips leading/trailing
/// punctuation from every token. Inner apostrophes and decimal points stay.
std::vector<std::string> tokenize(std::string_view s);

/// Reads a word list: one entry per line, blank lines and '#' comments
/// skipped, entries normalized.
std::vector<std::string> parse_word_list(std::string_view content);

std::string read_file(const std::string& path);

}  // namespace nora::text
