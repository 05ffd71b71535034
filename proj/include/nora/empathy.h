#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "nora/common.h"

namespace nora {

struct SessionRecord;

struct EmpathyScores {
  double sentiment = 0.0;  // [-1, 1]
  double stress = 0.0;     // [0, 1]
  ExpressionClass emotion = ExpressionClass::kNeutral;

  bool operator==(const EmpathyScores&) const = default;
};

/// Word lists behind the text scorers, one set per category.
struct Lexicons {
  std::set<std::string> positive;
  std::set<std::string> negative;
  std::set<std::string> stress;
  std::set<std::string> negators;
  /// Keyed by every class except neutral.
  std::map<ExpressionClass, std::set<std::string>> emotions;
  /// Multi-word phrases marking a comforting system response.
  std::vector<std::string> comfort;

  static const Lexicons& builtin();
  /// Reads <dir>/<category>.txt for every category; a missing file falls back
  /// to the built-in list for that category.
  static Lexicons load_dir(const std::string& dir);
};

/// Lexicon scoring of one utterance:
///   sentiment = (positive - negative) / max(1, positive + negative)
///   stress    = stress hits / max(1, tokens), clamped to [0, 1]
///   emotion   = emotion lexicon with the most hits, neutral on a tie or none.
/// The first sentiment word within three tokens after a negator counts for
/// the opposite side ("not bad" is positive); later words are unaffected.
EmpathyScores score_turn(std::string_view text,
                         const Lexicons& lex = Lexicons::builtin());

/// Per-category emotion hit counts, exposed for the expression predictor.
std::map<ExpressionClass, int> emotion_hits(std::string_view text,
                                            const Lexicons& lex);

struct TimelineEntry {
  Date date;
  double mean_sentiment = 0.0;
  double mean_stress = 0.0;
  ExpressionClass dominant_emotion = ExpressionClass::kNeutral;

  bool operator==(const TimelineEntry&) const = default;
};

struct MoodTimeline {
  std::string user_id;
  std::vector<TimelineEntry> entries;  // strictly increasing dates

  bool operator==(const MoodTimeline&) const = default;
};

/// Appends the day's aggregate of the session's user turns. Throws
/// OutOfOrderDate unless session.date is after the last entry, and
/// std::invalid_argument if the session has not ended.
MoodTimeline update_timeline(MoodTimeline timeline, const SessionRecord& session);

enum class CareFlag { kNone, kElevated, kExtreme };

std::string_view to_string(CareFlag f);

/// Configurable thresholds for detect_extreme.
struct CareThresholds {
  double extreme_stress = 0.7;       // current.stress above this
  double extreme_sentiment = -0.6;   // current.sentiment below this
  double elevated_mean = -0.3;       // rolling mean sentiment below this
  std::size_t window = 3;            // entries in the rolling mean

  void validate() const;
};

CareFlag detect_extreme(const MoodTimeline& timeline,
                        const EmpathyScores& current,
                        const CareThresholds& thresholds = {});

}  // namespace nora
