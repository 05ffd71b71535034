#pragma once

#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "nora/common.h"

namespace nora {

/// Intent inventory of the check-in flow. Reconstructed from the dialogue
/// flow; no intent list is published for the original system.
enum class Intent {
  kAffirm,
  kDeny,
  kMoodReport,
  kTemperatureReport,
  kBreathReport,
  kProfessionReport,
  kGratitudeReport,
  kActivityFeedback,
  kFarewell,
  kUnknown,
};

std::string_view to_string(Intent i);
std::optional<Intent> parse_intent(std::string_view name);

enum class Polarity { kYes, kNo };

std::string_view to_string(Polarity p);

struct Slots {
  std::optional<double> temperature_c;
  std::optional<Polarity> polarity;
  std::optional<std::string> profession;
  std::optional<std::string> mood_word;
  std::optional<Activity> activity;

  bool operator==(const Slots&) const = default;
};

struct NluResult {
  Intent intent = Intent::kUnknown;
  Slots slots;
  /// 1.0 for a rule match, 0.0 for Unknown.
  double confidence = 0.0;
  /// Trimmed input, kept for answers stored verbatim (gratitude).
  std::string utterance;

  bool operator==(const NluResult&) const = default;
};

/// One line of a rule file: `intent<TAB>pattern`. The intent column may carry
/// a polarity hint (`BreathReport=no`). Capture group 1, when present, is the
/// slot text for ProfessionReport/MoodReport/ActivityFeedback.
struct Rule {
  Intent intent;
  std::optional<Polarity> polarity_hint;
  std::string source;
  std::regex pattern;
};

class RuleSet {
 public:
  /// Parses rule-file text; throws InvalidConfig naming the bad line.
  static RuleSet parse(std::string_view content);
  static RuleSet load(const std::string& path);
  /// Rules compiled into the library from data/nlu_rules.tsv.
  static const RuleSet& builtin();

  const std::vector<Rule>& rules() const { return rules_; }

  /// First rule of `intent` matching `normalized`, in file order.
  const Rule* first_match(Intent intent, const std::string& normalized,
                          std::smatch* match = nullptr) const;

 private:
  std::vector<Rule> rules_;
};

/// Plausible body temperature from the first number in `text`: [30, 45] is
/// taken as Celsius, [86, 113] as Fahrenheit (converted, one decimal).
std::optional<double> extract_temperature(std::string_view text);

/// Yes/no reading of an answer. Negation outranks affirmation.
std::optional<Polarity> parse_polarity(std::string_view text,
                                       const RuleSet& rules = RuleSet::builtin());

/// Phase-conditioned, priority-ordered rule matcher. Stateless after
/// construction; safe to share across threads.
class Understander {
 public:
  Understander() : rules_(&RuleSet::builtin()) {}
  explicit Understander(const RuleSet& rules) : rules_(&rules) {}

  NluResult understand(std::string_view text, Phase phase) const;

 private:
  NluResult general(const std::string& norm, const std::string& trimmed) const;

  const RuleSet* rules_;
};

inline NluResult understand(std::string_view text, Phase phase) {
  return Understander().understand(text, phase);
}

}  // namespace nora
