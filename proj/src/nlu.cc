#include "nora/nlu.h"

#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

#include "nora/assets.h"
#include "nora/text.h"

namespace nora {

namespace {

constexpr std::array<std::string_view, 10> kIntentNames = {
    "Affirm",         "Deny",           "MoodReport",       "TemperatureReport",
    "BreathReport",   "ProfessionReport", "GratitudeReport", "ActivityFeedback",
    "Farewell",       "Unknown"};

// Words that end a profession phrase ("a nurse at the clinic" -> "nurse").
constexpr std::array<std::string_view, 9> kPhraseBreaks = {
    " at ", " in ", " for ", " and ", " but ", " so ", " who ", " with ", " from "};

struct ActivityKeyword {
  std::string_view word;
  Activity activity;
};

constexpr std::array<ActivityKeyword, 12> kActivityKeywords = {{
    {"yoga", Activity::kYoga},
    {"stretching", Activity::kYoga},
    {"exercise", Activity::kExercise},
    {"exercising", Activity::kExercise},
    {"workout", Activity::kExercise},
    {"jogging", Activity::kExercise},
    {"running", Activity::kExercise},
    {"walk", Activity::kExercise},
    {"meditation", Activity::kMeditation},
    {"meditate", Activity::kMeditation},
    {"meditating", Activity::kMeditation},
    {"mindfulness", Activity::kMeditation},
}};

std::size_t word_count(std::string_view s) {
  std::istringstream in{std::string(s)};
  std::size_t n = 0;
  std::string w;
  while (in >> w) ++n;
  return n;
}

std::string clean_phrase(std::string phrase, std::size_t max_words) {
  phrase = " " + phrase + " ";
  for (auto brk : kPhraseBreaks) {
    if (auto pos = phrase.find(brk); pos != std::string::npos) {
      phrase.resize(pos);
    }
  }
  std::istringstream in(phrase);
  std::string word, out;
  for (std::size_t n = 0; n < max_words && in >> word; ++n) {
    if (!out.empty()) out.push_back(' ');
    out += word;
  }
  return out;
}

std::string strip_punct(std::string_view s) {
  auto tokens = text::tokenize(s);
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

std::optional<Activity> find_activity(std::string_view norm) {
  for (const auto& token : text::tokenize(norm)) {
    for (const auto& kw : kActivityKeywords) {
      if (token == kw.word) return kw.activity;
    }
  }
  return std::nullopt;
}

NluResult matched(Intent intent, const std::string& trimmed) {
  NluResult r;
  r.intent = intent;
  r.confidence = 1.0;
  r.utterance = trimmed;
  return r;
}

std::optional<Polarity> breath_polarity(const Rule& rule,
                                        std::optional<Polarity> said) {
  Polarity p = rule.polarity_hint.value_or(Polarity::kYes);
  if (p == Polarity::kYes && said == Polarity::kNo) p = Polarity::kNo;
  return p;
}

}  // namespace

std::string_view to_string(Intent i) {
  return kIntentNames[static_cast<std::size_t>(i)];
}

std::optional<Intent> parse_intent(std::string_view name) {
  for (std::size_t i = 0; i < kIntentNames.size(); ++i) {
    if (kIntentNames[i] == name) return static_cast<Intent>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Polarity p) {
  return p == Polarity::kYes ? "yes" : "no";
}

RuleSet RuleSet::parse(std::string_view content) {
  RuleSet set;
  std::istringstream in{std::string(content)};
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string stripped = text::trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;

    auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw InvalidConfig("rule line " + std::to_string(lineno) +
                          ": expected intent<TAB>pattern");
    }
    std::string label = text::trim(line.substr(0, tab));
    std::string pattern = text::trim(line.substr(tab + 1));

    Rule rule;
    if (auto eq = label.find('='); eq != std::string::npos) {
      std::string hint = label.substr(eq + 1);
      label.resize(eq);
      if (hint == "yes") {
        rule.polarity_hint = Polarity::kYes;
      } else if (hint == "no") {
        rule.polarity_hint = Polarity::kNo;
      } else {
        throw InvalidConfig("rule line " + std::to_string(lineno) +
                            ": unknown polarity hint '" + hint + "'");
      }
    }
    auto intent = parse_intent(label);
    if (!intent || *intent == Intent::kUnknown) {
      throw InvalidConfig("rule line " + std::to_string(lineno) +
                          ": unknown intent '" + label + "'");
    }
    rule.intent = *intent;
    rule.source = pattern;
    try {
      rule.pattern = std::regex(pattern, std::regex::ECMAScript |
                                             std::regex::icase |
                                             std::regex::optimize);
    } catch (const std::regex_error& e) {
      throw InvalidConfig("rule line " + std::to_string(lineno) +
                          ": bad pattern: " + e.what());
    }
    set.rules_.push_back(std::move(rule));
  }
  return set;
}

RuleSet RuleSet::load(const std::string& path) {
  return parse(text::read_file(path));
}

const RuleSet& RuleSet::builtin() {
  static const RuleSet rules = parse(assets::nlu_rules());
  return rules;
}

const Rule* RuleSet::first_match(Intent intent, const std::string& normalized,
                                 std::smatch* match) const {
  std::smatch local;
  for (const auto& rule : rules_) {
    if (rule.intent != intent) continue;
    if (std::regex_search(normalized, match ? *match : local, rule.pattern)) {
      return &rule;
    }
  }
  return nullptr;
}

std::optional<double> extract_temperature(std::string_view text) {
  static const std::regex kNumber(R"((\d+(?:\.\d+)?))");
  std::string s(text);
  std::smatch m;
  if (!std::regex_search(s, m, kNumber)) return std::nullopt;

  const std::string digits = m[1].str();
  double value = 0.0;
  auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc{}) return std::nullopt;

  if (value >= 30.0 && value <= 45.0) return value;
  if (value >= 86.0 && value <= 113.0) {
    return std::round((value - 32.0) * 5.0 / 9.0 * 10.0) / 10.0;
  }
  return std::nullopt;
}

std::optional<Polarity> parse_polarity(std::string_view text,
                                       const RuleSet& rules) {
  const std::string norm = text::normalize(text);
  if (rules.first_match(Intent::kDeny, norm)) return Polarity::kNo;
  if (rules.first_match(Intent::kAffirm, norm)) return Polarity::kYes;
  return std::nullopt;
}

NluResult Understander::understand(std::string_view input, Phase phase) const {
  const std::string trimmed = text::trim(input);
  const std::string norm = text::normalize(trimmed);
  if (norm.empty()) return NluResult{};

  if (rules_->first_match(Intent::kFarewell, norm)) {
    return matched(Intent::kFarewell, trimmed);
  }

  std::smatch m;
  const auto said = parse_polarity(norm, *rules_);

  switch (phase) {
    case Phase::kIntro:
      if (said) {
        auto r = matched(said == Polarity::kYes ? Intent::kAffirm : Intent::kDeny,
                         trimmed);
        r.slots.polarity = said;
        return r;
      }
      break;

    case Phase::kAskProfession: {
      if (rules_->first_match(Intent::kProfessionReport, norm, &m)) {
        std::string job = clean_phrase(strip_punct(m[1].str()), 4);
        if (!job.empty()) {
          auto r = matched(Intent::kProfessionReport, trimmed);
          r.slots.profession = job;
          return r;
        }
      }
      if (said == Polarity::kNo) {
        auto r = matched(Intent::kDeny, trimmed);
        r.slots.polarity = said;
        return r;
      }
      std::string job = strip_punct(norm);
      if (!job.empty() && word_count(job) <= 4) {
        auto r = matched(Intent::kProfessionReport, trimmed);
        r.slots.profession = job;
        return r;
      }
      break;
    }

    case Phase::kAskMood:
      if (rules_->first_match(Intent::kMoodReport, norm, &m)) {
        auto r = matched(Intent::kMoodReport, trimmed);
        r.slots.mood_word = m[1].str();
        return r;
      }
      break;

    case Phase::kAskTemperature:
      if (auto t = extract_temperature(norm)) {
        auto r = matched(Intent::kTemperatureReport, trimmed);
        r.slots.temperature_c = t;
        return r;
      }
      break;

    case Phase::kAskBreath:
      if (const Rule* rule = rules_->first_match(Intent::kBreathReport, norm)) {
        auto r = matched(Intent::kBreathReport, trimmed);
        r.slots.polarity = breath_polarity(*rule, said);
        return r;
      }
      if (said) {
        auto r = matched(Intent::kBreathReport, trimmed);
        r.slots.polarity = said;
        return r;
      }
      break;

    case Phase::kAskGratitude:
      return matched(Intent::kGratitudeReport, trimmed);

    case Phase::kRecommendActivity: {
      const auto activity = find_activity(norm);
      if (said || activity) {
        const Polarity p = said.value_or(Polarity::kYes);
        auto r = matched(p == Polarity::kYes ? Intent::kAffirm : Intent::kDeny,
                         trimmed);
        r.slots.polarity = p;
        r.slots.activity = activity;
        return r;
      }
      break;
    }

    case Phase::kActivityFollowUp: {
      const bool feedback =
          rules_->first_match(Intent::kActivityFeedback, norm, &m) != nullptr;
      if (feedback || said) {
        auto r = matched(Intent::kActivityFeedback, trimmed);
        if (feedback) r.slots.mood_word = m[1].str();
        r.slots.polarity = said;
        r.slots.activity = find_activity(norm);
        return r;
      }
      break;
    }

    case Phase::kGoodbye:
    case Phase::kEnded:
      break;
  }
  return general(norm, trimmed);
}

NluResult Understander::general(const std::string& norm,
                                const std::string& trimmed) const {
  for (const auto& rule : rules_->rules()) {
    std::smatch m;
    if (rule.intent == Intent::kFarewell ||
        !std::regex_search(norm, m, rule.pattern)) {
      continue;
    }
    auto r = matched(rule.intent, trimmed);
    switch (rule.intent) {
      case Intent::kTemperatureReport:
        r.slots.temperature_c = extract_temperature(norm);
        if (!r.slots.temperature_c) continue;
        break;
      case Intent::kBreathReport:
        r.slots.polarity = breath_polarity(rule, parse_polarity(norm, *rules_));
        break;
      case Intent::kProfessionReport: {
        std::string job = clean_phrase(strip_punct(m[1].str()), 4);
        if (job.empty()) continue;
        r.slots.profession = job;
        break;
      }
      case Intent::kMoodReport:
        r.slots.mood_word = m[1].str();
        break;
      case Intent::kActivityFeedback:
        r.slots.mood_word = m[1].str();
        r.slots.polarity = parse_polarity(norm, *rules_);
        r.slots.activity = find_activity(norm);
        break;
      case Intent::kAffirm:
      case Intent::kDeny:
        r.slots.polarity =
            rule.intent == Intent::kAffirm ? Polarity::kYes : Polarity::kNo;
        r.slots.activity = find_activity(norm);
        break;
      default:
        break;
    }
    return r;
  }
  NluResult unknown;
  unknown.utterance = trimmed;
  return unknown;
}

}  // namespace nora
