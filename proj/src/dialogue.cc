#include "nora/dialogue.h"

#include <algorithm>
#include <cstdio>

#include "nora/rng.h"

namespace nora {

namespace {

Phase successor(Phase p, SessionKind kind) {
  switch (p) {
    case Phase::kIntro:
      return kind == SessionKind::kFirstDay ? Phase::kAskProfession
                                            : Phase::kAskMood;
    case Phase::kAskProfession:
      return Phase::kAskMood;
    case Phase::kAskMood:
      return Phase::kAskTemperature;
    case Phase::kAskTemperature:
      return Phase::kAskBreath;
    case Phase::kAskBreath:
      return Phase::kAskGratitude;
    case Phase::kAskGratitude:
      return Phase::kRecommendActivity;
    case Phase::kRecommendActivity:
      return Phase::kActivityFollowUp;
    case Phase::kActivityFollowUp:
      return Phase::kGoodbye;
    case Phase::kGoodbye:
    case Phase::kEnded:
      return Phase::kEnded;
  }
  return Phase::kEnded;
}

Activity offered_activity(const DialogueState& s) {
  return kAllActivities[static_cast<std::size_t>(s.day_index) % kAllActivities.size()];
}

bool accepts(Phase phase, const NluResult& nlu) {
  switch (phase) {
    case Phase::kAskProfession:
      return (nlu.intent == Intent::kProfessionReport && nlu.slots.profession) ||
             nlu.intent == Intent::kDeny;
    case Phase::kAskMood:
      return nlu.intent == Intent::kMoodReport;
    case Phase::kAskTemperature:
      return nlu.intent == Intent::kTemperatureReport &&
             nlu.slots.temperature_c.has_value();
    case Phase::kAskBreath:
      return nlu.intent == Intent::kBreathReport || nlu.intent == Intent::kAffirm ||
             nlu.intent == Intent::kDeny;
    case Phase::kAskGratitude:
      return nlu.intent == Intent::kGratitudeReport;
    case Phase::kRecommendActivity:
      return nlu.intent == Intent::kAffirm || nlu.intent == Intent::kDeny ||
             nlu.intent == Intent::kActivityFeedback;
    case Phase::kActivityFollowUp:
      return nlu.intent == Intent::kActivityFeedback ||
             nlu.intent == Intent::kAffirm || nlu.intent == Intent::kDeny ||
             nlu.intent == Intent::kMoodReport;
    default:
      return false;
  }
}

// Moves `s` into `next` and appends the question that opens it.
void enter(DialogueState& s, ResponsePlan& plan, Phase next) {
  s.phase = next;
  s.retries = 0;
  plan.next = next;
  switch (next) {
    case Phase::kAskProfession:
      plan.families.push_back("ask_profession");
      break;
    case Phase::kAskMood:
      plan.families.push_back("ask_mood");
      break;
    case Phase::kAskTemperature:
      plan.families.push_back("ask_temperature");
      break;
    case Phase::kAskBreath:
      plan.families.push_back("ask_breath");
      break;
    case Phase::kAskGratitude:
      plan.families.push_back("ask_gratitude");
      break;
    case Phase::kRecommendActivity:
      plan.families.push_back("recommend_activity");
      plan.params["activity"] = std::string(to_string(offered_activity(s)));
      break;
    case Phase::kActivityFollowUp:
      plan.families.push_back("ask_activity_followup");
      break;
    case Phase::kGoodbye:
      plan.families.push_back("goodbye");
      break;
    case Phase::kIntro:
    case Phase::kEnded:
      break;
  }
}

void acknowledge(const std::string& family, ResponsePlan& plan, bool comfortable) {
  plan.families.push_back(family);
  if (comfortable) plan.comfortable.push_back(family);
}

std::string feedback_label(const NluResult& nlu, const EmpathyScores& empathy) {
  if (empathy.sentiment > kPositiveSentiment) return "liked";
  if (empathy.sentiment < kComfortSentiment) return "disliked";
  if (nlu.slots.polarity == Polarity::kYes) return "liked";
  if (nlu.slots.polarity == Polarity::kNo) return "disliked";
  return "neutral";
}

// Stores the answer of `s.phase` and queues its acknowledgment.
void record(DialogueState& s, ResponsePlan& plan, const NluResult& nlu,
            const EmpathyScores& empathy) {
  Answers& a = s.answers;
  switch (s.phase) {
    case Phase::kAskProfession:
      if (nlu.intent == Intent::kProfessionReport) {
        a.profession = nlu.slots.profession;
        acknowledge("ack_profession", plan, false);
      } else {
        acknowledge("ack_profession_skip", plan, false);
      }
      break;
    case Phase::kAskMood:
      a.mood = nlu.slots.mood_word.value_or(nlu.utterance);
      acknowledge(empathy.sentiment > kPositiveSentiment ? "ack_mood_positive"
                                                         : "ack_mood",
                  plan, true);
      break;
    case Phase::kAskTemperature:
      a.temperature_c = nlu.slots.temperature_c;
      acknowledge("ack_temperature", plan, false);
      if (*a.temperature_c >= kFeverThresholdC) {
        acknowledge("escalate_health", plan, false);
      }
      break;
    case Phase::kAskBreath: {
      const Polarity p = nlu.slots.polarity.value_or(
          nlu.intent == Intent::kDeny ? Polarity::kNo : Polarity::kYes);
      a.short_of_breath = p == Polarity::kYes;
      if (*a.short_of_breath) {
        acknowledge("ack_breath_yes", plan, false);
        acknowledge("escalate_health", plan, false);
      } else {
        acknowledge("ack_breath_no", plan, false);
      }
      break;
    }
    case Phase::kAskGratitude:
      a.gratitude = nlu.utterance;
      acknowledge("ack_gratitude", plan, true);
      break;
    case Phase::kRecommendActivity:
      a.activity = nlu.slots.activity.value_or(offered_activity(s));
      acknowledge(nlu.intent == Intent::kDeny || nlu.slots.polarity == Polarity::kNo
                      ? "ack_activity_no"
                      : "ack_activity_yes",
                  plan, false);
      break;
    case Phase::kActivityFollowUp: {
      a.activity_feedback = feedback_label(nlu, empathy);
      acknowledge("ack_followup_" + *a.activity_feedback, plan, false);
      break;
    }
    default:
      break;
  }
}

}  // namespace

std::string_view to_string(SessionKind k) {
  return k == SessionKind::kFirstDay ? "first_day" : "daily";
}

std::optional<SessionKind> parse_session_kind(std::string_view name) {
  if (name == "first_day") return SessionKind::kFirstDay;
  if (name == "daily") return SessionKind::kDaily;
  return std::nullopt;
}

std::vector<Phase> phase_sequence(SessionKind kind) {
  std::vector<Phase> seq{Phase::kIntro};
  while (seq.back() != Phase::kEnded) seq.push_back(successor(seq.back(), kind));
  return seq;
}

Transition start_session(const std::string& user_id, const Date& date,
                         const std::vector<SessionRecord>& history) {
  std::vector<const SessionRecord*> prior;
  for (const auto& rec : history) {
    if (rec.date == date) {
      throw DuplicateSession("session for user '" + user_id + "' on " +
                             date.iso() + " already exists");
    }
    if (rec.date < date) prior.push_back(&rec);
  }
  std::sort(prior.begin(), prior.end(),
            [](const SessionRecord* a, const SessionRecord* b) { return a->date < b->date; });

  Transition t;
  DialogueState& s = t.state;
  s.kind = prior.empty() ? SessionKind::kFirstDay : SessionKind::kDaily;
  s.phase = Phase::kIntro;
  s.day_index = static_cast<int>(prior.size());
  for (auto it = prior.rbegin(); it != prior.rend(); ++it) {
    if ((*it)->answers.mood) {
      s.last_mood = (*it)->answers.mood;
      break;
    }
  }

  ResponsePlan& plan = t.plan;
  if (s.kind == SessionKind::kFirstDay) {
    plan.families.push_back("intro_first_day");
  } else if (s.last_mood) {
    plan.families.push_back("intro_daily_mood");
    plan.params["last_mood"] = *s.last_mood;
  } else {
    plan.families.push_back("intro_daily");
  }
  // The greeting carries the first question; Intro itself is not answered.
  DialogueState probe = s;
  enter(probe, plan, successor(Phase::kIntro, s.kind));
  return t;
}

Transition advance(const DialogueState& state, const NluResult& nlu,
                   const EmpathyScores& empathy) {
  if (state.phase == Phase::kEnded) {
    throw std::invalid_argument("advance: session already ended");
  }

  Transition t{state, {}};
  DialogueState& s = t.state;
  ResponsePlan& plan = t.plan;

  if (s.phase == Phase::kGoodbye) {
    s.phase = Phase::kEnded;
    s.retries = 0;
    plan.next = Phase::kEnded;
    return t;
  }
  if (nlu.intent == Intent::kFarewell) {
    plan.families.push_back("farewell");
    enter(s, plan, Phase::kGoodbye);
    return t;
  }
  if (s.phase == Phase::kIntro) s.phase = successor(Phase::kIntro, s.kind);

  if (accepts(s.phase, nlu)) {
    record(s, plan, nlu, empathy);
    enter(s, plan, successor(s.phase, s.kind));
    return t;
  }
  if (s.retries < kMaxRetries) {
    ++s.retries;
    plan.families.push_back("reask");
    const int retries = s.retries;
    enter(s, plan, s.phase);
    s.retries = retries;
    return t;
  }
  plan.families.push_back("skip");
  // Nothing to follow up on without an activity.
  enter(s, plan,
        s.phase == Phase::kRecommendActivity ? Phase::kGoodbye
                                             : successor(s.phase, s.kind));
  return t;
}

ResponsePlan resume_plan(const DialogueState& state) {
  ResponsePlan plan;
  plan.families.push_back("resume");
  DialogueState probe = state;
  const Phase at =
      state.phase == Phase::kIntro ? successor(Phase::kIntro, state.kind) : state.phase;
  enter(probe, plan, at);
  return plan;
}

void add_care_note(ResponsePlan& plan, CareFlag flag) {
  if (flag == CareFlag::kNone || plan.families.empty()) return;
  const std::string note = flag == CareFlag::kExtreme ? "care_extreme" : "care_elevated";
  // Goodbye and questions close the utterance; the note goes right before.
  plan.families.insert(plan.families.end() - 1, note);
}

std::string format_temperature(double celsius) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", celsius);
  return buf;
}

std::string render_response(const ResponsePlan& plan, const Answers& answers,
                            const EmpathyScores& empathy, std::uint64_t rng_seed,
                            const TemplateBank& bank) {
  std::map<std::string, std::string> values;
  if (answers.profession) values["profession"] = *answers.profession;
  if (answers.mood) values["mood"] = *answers.mood;
  if (answers.temperature_c) values["temperature"] = format_temperature(*answers.temperature_c);
  if (answers.gratitude) values["gratitude"] = *answers.gratitude;
  if (answers.activity) values["activity"] = std::string(to_string(*answers.activity));
  if (answers.activity_feedback) values["activity_feedback"] = *answers.activity_feedback;
  for (const auto& [key, value] : plan.params) values[key] = value;

  const bool comfort = empathy.sentiment < kComfortSentiment;
  Rng rng(rng_seed);
  std::string out;
  for (const auto& family : plan.families) {
    std::string chosen = family;
    if (comfort &&
        std::find(plan.comfortable.begin(), plan.comfortable.end(), family) !=
            plan.comfortable.end() &&
        bank.has(family + ":comfort")) {
      chosen = family + ":comfort";
    }
    const auto& variants = bank.variants(chosen);
    const auto& pattern = variants[rng.below(variants.size())];
    if (!out.empty()) out.push_back(' ');
    out += fill_template(pattern, values);
  }
  return out;
}

}  // namespace nora
