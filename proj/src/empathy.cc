#include "nora/empathy.h"

#include <algorithm>
#include <filesystem>
#include <stdexcept>

#include "nora/assets.h"
#include "nora/dialogue.h"
#include "nora/text.h"

namespace nora {

namespace {

constexpr int kNegationWindow = 3;

const std::pair<ExpressionClass, std::string_view> kEmotionFiles[] = {
    {ExpressionClass::kHappiness, "happiness"},
    {ExpressionClass::kSadness, "sadness"},
    {ExpressionClass::kAnger, "anger"},
    {ExpressionClass::kSurprise, "surprise"},
    {ExpressionClass::kLaughter, "laughter"},
};

std::vector<std::string> category(std::string_view name, const std::string& dir) {
  if (!dir.empty()) {
    auto path = std::filesystem::path(dir) / (std::string(name) + ".txt");
    if (std::filesystem::exists(path)) {
      return text::parse_word_list(text::read_file(path.string()));
    }
  }
  return text::parse_word_list(assets::lexicon(name));
}

Lexicons build(const std::string& dir) {
  auto as_set = [](std::vector<std::string> v) {
    return std::set<std::string>(v.begin(), v.end());
  };
  Lexicons lex;
  lex.positive = as_set(category("positive", dir));
  lex.negative = as_set(category("negative", dir));
  lex.stress = as_set(category("stress", dir));
  lex.negators = as_set(category("negators", dir));
  for (const auto& [cls, name] : kEmotionFiles) {
    lex.emotions[cls] = as_set(category(name, dir));
  }
  lex.comfort = category("comfort", dir);
  return lex;
}

// Unique argmax over counts, neutral on a tie or when nothing was counted.
ExpressionClass dominant(const std::map<ExpressionClass, int>& counts) {
  ExpressionClass best = ExpressionClass::kNeutral;
  int best_count = 0;
  bool tie = false;
  for (const auto& [cls, n] : counts) {
    if (n > best_count) {
      best = cls;
      best_count = n;
      tie = false;
    } else if (n == best_count && n > 0) {
      tie = true;
    }
  }
  return tie ? ExpressionClass::kNeutral : best;
}

}  // namespace

const Lexicons& Lexicons::builtin() {
  static const Lexicons lex = build("");
  return lex;
}

Lexicons Lexicons::load_dir(const std::string& dir) { return build(dir); }

std::map<ExpressionClass, int> emotion_hits(std::string_view text,
                                            const Lexicons& lex) {
  std::map<ExpressionClass, int> counts;
  for (const auto& token : text::tokenize(text)) {
    for (const auto& [cls, words] : lex.emotions) {
      if (words.contains(token)) ++counts[cls];
    }
  }
  return counts;
}

EmpathyScores score_turn(std::string_view text, const Lexicons& lex) {
  const auto tokens = text::tokenize(text);
  EmpathyScores scores;
  if (tokens.empty()) return scores;

  int positive = 0;
  int negative = 0;
  int stress = 0;
  int since_negator = kNegationWindow + 1;
  for (const auto& token : tokens) {
    if (lex.negators.contains(token)) {
      since_negator = 0;
      continue;
    }
    ++since_negator;
    const bool negated = since_negator <= kNegationWindow;
    const bool pos = lex.positive.contains(token);
    const bool neg = lex.negative.contains(token);
    if (pos) ++(negated ? negative : positive);
    if (neg) ++(negated ? positive : negative);
    // A negator flips only the first sentiment word it reaches.
    if (negated && (pos || neg)) since_negator = kNegationWindow + 1;
    if (lex.stress.contains(token)) ++stress;
  }

  const int hits = positive + negative;
  scores.sentiment = static_cast<double>(positive - negative) / std::max(1, hits);
  scores.stress = std::clamp(
      static_cast<double>(stress) / static_cast<double>(tokens.size()), 0.0, 1.0);
  scores.emotion = dominant(emotion_hits(text, lex));
  return scores;
}

MoodTimeline update_timeline(MoodTimeline timeline, const SessionRecord& session) {
  if (!session.completed) {
    throw std::invalid_argument("update_timeline: session has not ended");
  }
  if (!timeline.entries.empty() && session.date <= timeline.entries.back().date) {
    throw OutOfOrderDate("session date " + session.date.iso() +
                         " is not after last timeline date " +
                         timeline.entries.back().date.iso());
  }
  if (timeline.user_id.empty()) timeline.user_id = session.user_id;

  TimelineEntry entry{session.date};
  std::map<ExpressionClass, int> emotions;
  int n = 0;
  for (const auto& turn : session.turns) {
    if (turn.speaker != Speaker::kUser || !turn.empathy) continue;
    entry.mean_sentiment += turn.empathy->sentiment;
    entry.mean_stress += turn.empathy->stress;
    ++emotions[turn.empathy->emotion];
    ++n;
  }
  if (n > 0) {
    entry.mean_sentiment /= n;
    entry.mean_stress /= n;
  }
  // A majority of neutral turns is a legitimate outcome here.
  ExpressionClass best = ExpressionClass::kNeutral;
  int best_count = 0;
  bool tie = false;
  for (const auto& [cls, count] : emotions) {
    if (count > best_count) {
      best = cls;
      best_count = count;
      tie = false;
    } else if (count == best_count) {
      tie = true;
    }
  }
  entry.dominant_emotion = tie ? ExpressionClass::kNeutral : best;
  timeline.entries.push_back(entry);
  return timeline;
}

std::string_view to_string(CareFlag f) {
  switch (f) {
    case CareFlag::kNone:
      return "none";
    case CareFlag::kElevated:
      return "elevated";
    case CareFlag::kExtreme:
      return "extreme";
  }
  return "none";
}

void CareThresholds::validate() const {
  if (extreme_stress < 0.0 || extreme_stress > 1.0) {
    throw InvalidConfig("extreme stress threshold must lie in [0, 1]");
  }
  if (extreme_sentiment < -1.0 || extreme_sentiment > 1.0 ||
      elevated_mean < -1.0 || elevated_mean > 1.0) {
    throw InvalidConfig("sentiment thresholds must lie in [-1, 1]");
  }
  if (window == 0) throw InvalidConfig("rolling window must be positive");
}

CareFlag detect_extreme(const MoodTimeline& timeline, const EmpathyScores& current,
                        const CareThresholds& t) {
  if (current.stress > t.extreme_stress || current.sentiment < t.extreme_sentiment) {
    return CareFlag::kExtreme;
  }
  const auto& entries = timeline.entries;
  if (entries.size() >= t.window) {
    double sum = 0.0;
    for (auto it = entries.end() - static_cast<std::ptrdiff_t>(t.window);
         it != entries.end(); ++it) {
      sum += it->mean_sentiment;
    }
    if (sum / static_cast<double>(t.window) < t.elevated_mean) {
      return CareFlag::kElevated;
    }
  }
  return CareFlag::kNone;
}

}  // namespace nora
