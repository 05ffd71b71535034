#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nora/common.h"
#include "nora/empathy.h"
#include "nora/nlu.h"
#include "nora/templates.h"

namespace nora {

enum class SessionKind { kFirstDay, kDaily };

std::string_view to_string(SessionKind k);
std::optional<SessionKind> parse_session_kind(std::string_view name);

struct Answers {
  std::optional<std::string> profession;
  std::optional<std::string> mood;
  std::optional<double> temperature_c;
  std::optional<bool> short_of_breath;
  std::optional<std::string> gratitude;
  std::optional<Activity> activity;
  std::optional<std::string> activity_feedback;  // liked | disliked | neutral

  bool operator==(const Answers&) const = default;
};

enum class Speaker { kUser, kSystem };

struct TurnRecord {
  Speaker speaker = Speaker::kSystem;
  std::string text;
  std::int64_t timestamp_ms = 0;  // since session start
  std::optional<EmpathyScores> empathy;       // user turns
  std::optional<ExpressionClass> expression;  // system turns

  bool operator==(const TurnRecord&) const = default;
};

struct SessionRecord {
  std::string user_id;
  Date date;
  SessionKind kind = SessionKind::kFirstDay;
  std::vector<TurnRecord> turns;
  Answers answers;
  bool completed = false;

  bool operator==(const SessionRecord&) const = default;
};

struct DialogueState {
  SessionKind kind = SessionKind::kFirstDay;
  Phase phase = Phase::kIntro;
  int retries = 0;
  /// Sessions before this one; picks the day's activity.
  int day_index = 0;
  std::optional<std::string> last_mood;
  Answers answers;

  bool operator==(const DialogueState&) const = default;
};

/// What the system should say next: template families in speaking order plus
/// plan-level placeholder values. Families listed in `comfortable` may be
/// swapped for their ":comfort" version by render_response.
struct ResponsePlan {
  std::vector<std::string> families;
  std::vector<std::string> comfortable;
  std::map<std::string, std::string> params;
  /// Phase the user's next answer belongs to.
  Phase next = Phase::kEnded;

  bool empty() const { return families.empty(); }
  bool operator==(const ResponsePlan&) const = default;
};

struct Transition {
  DialogueState state;
  ResponsePlan plan;
};

inline constexpr int kMaxRetries = 2;
inline constexpr double kFeverThresholdC = 37.5;
inline constexpr double kComfortSentiment = -0.3;
inline constexpr double kPositiveSentiment = 0.3;

/// Opens a session. `history` is the user's prior records; throws
/// DuplicateSession if one of them has `date`.
Transition start_session(const std::string& user_id, const Date& date,
                         const std::vector<SessionRecord>& history);

/// Pure transition function over the check-in flow. Requires
/// state.phase != Ended (std::invalid_argument otherwise). From Goodbye every
/// input moves to Ended with an empty plan.
Transition advance(const DialogueState& state, const NluResult& nlu,
                   const EmpathyScores& empathy);

/// Plan that re-opens an interrupted session at its current question.
ResponsePlan resume_plan(const DialogueState& state);

/// Adds the care note for `flag` just before the trailing question.
void add_care_note(ResponsePlan& plan, CareFlag flag);

/// Phase order of the flow for `kind`, Intro to Ended.
std::vector<Phase> phase_sequence(SessionKind kind);

/// Picks one variant per family (seeded uniform choice) and fills the
/// placeholders from `answers` and plan.params. Throws MissingSlot when a
/// placeholder has no value.
std::string render_response(const ResponsePlan& plan, const Answers& answers,
                            const EmpathyScores& empathy, std::uint64_t rng_seed,
                            const TemplateBank& bank = TemplateBank::builtin());

std::string format_temperature(double celsius);

}  // namespace nora
