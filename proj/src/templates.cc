#include "nora/templates.h"

#include <charconv>
#include <sstream>

#include "nora/assets.h"
#include "nora/common.h"
#include "nora/text.h"

namespace nora {

TemplateBank TemplateBank::parse(std::string_view content) {
  std::map<std::string, std::map<int, std::string>> indexed;
  std::istringstream in{std::string(content)};
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const std::string stripped = text::trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;

    const auto tab1 = line.find('\t');
    const auto tab2 = tab1 == std::string::npos ? tab1 : line.find('\t', tab1 + 1);
    if (tab2 == std::string::npos) {
      throw InvalidConfig("template line " + std::to_string(lineno) +
                          ": expected family<TAB>variant<TAB>text");
    }
    const std::string family = text::trim(line.substr(0, tab1));
    const std::string index_text = text::trim(line.substr(tab1 + 1, tab2 - tab1 - 1));
    int index = -1;
    auto [ptr, ec] = std::from_chars(index_text.data(),
                                     index_text.data() + index_text.size(), index);
    if (ec != std::errc{} || ptr != index_text.data() + index_text.size() ||
        index < 0) {
      throw InvalidConfig("template line " + std::to_string(lineno) +
                          ": bad variant index '" + index_text + "'");
    }
    if (!indexed[family].emplace(index, text::trim(line.substr(tab2 + 1))).second) {
      throw InvalidConfig("template line " + std::to_string(lineno) +
                          ": duplicate variant " + family + "/" + index_text);
    }
  }

  TemplateBank bank;
  for (auto& [family, variants] : indexed) {
    int expected = 0;
    for (auto& [index, body] : variants) {
      if (index != expected++) {
        throw InvalidConfig("template family " + family +
                            ": variant indices must be 0..n-1");
      }
      bank.families_[family].push_back(std::move(body));
    }
  }
  return bank;
}

TemplateBank TemplateBank::load(const std::string& path) {
  return parse(text::read_file(path));
}

const TemplateBank& TemplateBank::builtin() {
  static const TemplateBank bank = parse(assets::templates());
  return bank;
}

const std::vector<std::string>& TemplateBank::variants(
    const std::string& family) const {
  auto it = families_.find(family);
  if (it == families_.end()) {
    throw std::out_of_range("unknown template family '" + family + "'");
  }
  return it->second;
}

std::vector<std::string> TemplateBank::families() const {
  std::vector<std::string> names;
  for (const auto& [name, _] : families_) names.push_back(name);
  return names;
}

std::vector<std::string> placeholders(std::string_view pattern) {
  std::vector<std::string> names;
  for (std::size_t pos = 0; (pos = pattern.find('{', pos)) != std::string_view::npos;) {
    const auto close = pattern.find('}', pos);
    if (close == std::string_view::npos) break;
    names.emplace_back(pattern.substr(pos + 1, close - pos - 1));
    pos = close + 1;
  }
  return names;
}

std::string fill_template(std::string_view pattern,
                          const std::map<std::string, std::string>& values) {
  std::string out;
  std::size_t pos = 0;
  while (pos < pattern.size()) {
    const auto open = pattern.find('{', pos);
    const auto close =
        open == std::string_view::npos ? open : pattern.find('}', open);
    if (close == std::string_view::npos) {
      out.append(pattern.substr(pos));
      break;
    }
    out.append(pattern.substr(pos, open - pos));
    const std::string name(pattern.substr(open + 1, close - open - 1));
    auto it = values.find(name);
    if (it == values.end()) {
      throw MissingSlot("template placeholder {" + name + "} has no value");
    }
    out += it->second;
    pos = close + 1;
  }
  return out;
}

}  // namespace nora
