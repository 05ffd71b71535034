#include "nora/text.h"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace nora::text {

namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

bool is_word_char(unsigned char c) { return std::isalnum(c) != 0 || c >= 0x80; }

}  // namespace

std::string trim(std::string_view s) {
  auto begin = std::find_if_not(s.begin(), s.end(),
                                [](unsigned char c) { return is_space(c); });
  auto end = std::find_if_not(s.rbegin(), s.rend(),
                              [](unsigned char c) { return is_space(c); })
                 .base();
  return begin < end ? std::string(begin, end) : std::string();
}

std::string to_lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string normalize(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    unsigned char c = s[i];
    // U+2018 / U+2019 in UTF-8.
    if (c == 0xE2 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x80 &&
        (static_cast<unsigned char>(s[i + 2]) == 0x98 ||
         static_cast<unsigned char>(s[i + 2]) == 0x99)) {
      c = '\'';
      i += 2;
    }
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(std::tolower(c)));
  }
  return out;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> tokens;
  std::istringstream in(normalize(s));
  std::string raw;
  while (in >> raw) {
    auto first = std::find_if(raw.begin(), raw.end(),
                              [](unsigned char c) { return is_word_char(c); });
    auto last = std::find_if(raw.rbegin(), raw.rend(),
                             [](unsigned char c) { return is_word_char(c); })
                    .base();
    if (first < last) tokens.emplace_back(first, last);
  }
  return tokens;
}

std::vector<std::string> parse_word_list(std::string_view content) {
  std::vector<std::string> words;
  std::istringstream in{std::string(content)};
  std::string line;
  while (std::getline(in, line)) {
    std::string entry = normalize(trim(line));
    if (entry.empty() || entry.front() == '#') continue;
    words.push_back(std::move(entry));
  }
  return words;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace nora::text
