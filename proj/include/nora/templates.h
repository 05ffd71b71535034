#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace nora {

/// Response templates grouped by family. Asset format, one per line:
///   family<TAB>variant_index<TAB>text with {placeholders}
/// The comforting variant of family F is the family "F:comfort".
class TemplateBank {
 public:
  static TemplateBank parse(std::string_view content);
  static TemplateBank load(const std::string& path);
  static const TemplateBank& builtin();

  bool has(const std::string& family) const { return families_.contains(family); }
  /// Variants ordered by index; throws std::out_of_range for unknown families.
  const std::vector<std::string>& variants(const std::string& family) const;
  std::vector<std::string> families() const;

 private:
  std::map<std::string, std::vector<std::string>> families_;
};

/// Substitutes every {name} in `pattern`. Throws MissingSlot when a
/// placeholder has no value.
std::string fill_template(std::string_view pattern,
                          const std::map<std::string, std::string>& values);

/// Placeholder names used by `pattern`, in order of appearance.
std::vector<std::string> placeholders(std::string_view pattern);

}  // namespace nora
