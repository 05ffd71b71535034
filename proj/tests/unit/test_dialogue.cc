#include <doctest.h>

#include <algorithm>

#include "nora/dialogue.h"
#include "nora/expression.h"
#include "nora/rng.h"

using namespace nora;

namespace {

const Date kDay = Date::parse("2025-05-01");

bool contains(const std::vector<std::string>& v, const std::string& s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

NluResult nlu_of(Intent intent, Slots slots = {}, std::string utterance = "x") {
  return NluResult{intent, std::move(slots), intent == Intent::kUnknown ? 0.0 : 1.0,
                   std::move(utterance)};
}

DialogueState at(Phase phase, SessionKind kind = SessionKind::kDaily) {
  DialogueState s;
  s.kind = kind;
  s.phase = phase;
  return s;
}

SessionRecord prior(const char* date, std::optional<std::string> mood = "tired") {
  SessionRecord r{"u1", Date::parse(date), SessionKind::kFirstDay, {}, {}, true};
  r.answers.mood = std::move(mood);
  return r;
}

}  // namespace

TEST_CASE("start_session: reference examples") {
  const Transition fresh = start_session("u1", kDay, {});
  CHECK(fresh.state.kind == SessionKind::kFirstDay);
  CHECK(fresh.state.phase == Phase::kIntro);
  CHECK(fresh.plan.next == Phase::kAskProfession);
  CHECK(contains(fresh.plan.families, "ask_profession"));

  const Transition daily = start_session("u1", kDay, {prior("2025-04-30")});
  CHECK(daily.state.kind == SessionKind::kDaily);
  CHECK(daily.state.phase == Phase::kIntro);
  CHECK(daily.plan.next == Phase::kAskMood);
  CHECK(contains(daily.plan.families, "ask_mood"));
  CHECK(daily.state.last_mood == "tired");

  CHECK_THROWS_AS(start_session("u1", kDay, {prior("2025-05-01")}), DuplicateSession);
}

TEST_CASE("advance: reference examples") {
  Slots temp;
  temp.temperature_c = 37.2;
  const Transition t = advance(at(Phase::kAskTemperature),
                               nlu_of(Intent::kTemperatureReport, temp), {});
  CHECK(t.state.phase == Phase::kAskBreath);
  CHECK(t.state.answers.temperature_c == 37.2);
  CHECK(contains(t.plan.families, "ack_temperature"));
  CHECK_FALSE(contains(t.plan.families, "escalate_health"));
  const std::string text = render_response(t.plan, t.state.answers, {}, 1);
  CHECK(text.find("37.2") != std::string::npos);

  const Transition retry = advance(at(Phase::kAskMood), nlu_of(Intent::kUnknown), {});
  CHECK(retry.state.phase == Phase::kAskMood);
  CHECK(retry.state.retries == 1);
  CHECK(retry.plan.families.front() == "reask");
  CHECK(contains(retry.plan.families, "ask_mood"));

  const Transition bye = advance(at(Phase::kAskGratitude), nlu_of(Intent::kFarewell), {});
  CHECK(bye.state.phase == Phase::kGoodbye);
  CHECK(contains(bye.plan.families, "goodbye"));
}

TEST_CASE("retries are bounded, then the phase is skipped") {
  DialogueState s = at(Phase::kAskMood);
  for (int i = 1; i <= kMaxRetries; ++i) {
    s = advance(s, nlu_of(Intent::kUnknown), {}).state;
    CHECK(s.phase == Phase::kAskMood);
    CHECK(s.retries == i);
  }
  const Transition skip = advance(s, nlu_of(Intent::kUnknown), {});
  CHECK(skip.state.phase == Phase::kAskTemperature);
  CHECK(skip.state.retries == 0);
  CHECK(skip.plan.families.front() == "skip");
  CHECK_FALSE(skip.state.answers.mood.has_value());

  DialogueState rec = at(Phase::kRecommendActivity);
  rec.retries = kMaxRetries;
  CHECK(advance(rec, nlu_of(Intent::kUnknown), {}).state.phase == Phase::kGoodbye);
}

TEST_CASE("off-topic intents never fill an answer") {
  const Transition t =
      advance(at(Phase::kAskTemperature), nlu_of(Intent::kAffirm), {});
  CHECK(t.state.phase == Phase::kAskTemperature);
  CHECK_FALSE(t.state.answers.temperature_c.has_value());
}

TEST_CASE("fever and breathing trouble escalate") {
  Slots hot;
  hot.temperature_c = 37.5;
  CHECK(contains(advance(at(Phase::kAskTemperature), nlu_of(Intent::kTemperatureReport, hot), {})
                     .plan.families,
                 "escalate_health"));
  Slots yes;
  yes.polarity = Polarity::kYes;
  const Transition b = advance(at(Phase::kAskBreath), nlu_of(Intent::kBreathReport, yes), {});
  CHECK(b.state.answers.short_of_breath == true);
  CHECK(contains(b.plan.families, "escalate_health"));
  CHECK(render_response(b.plan, b.state.answers, {}, 3).find("health professional") !=
        std::string::npos);
}

TEST_CASE("Goodbye ends the session; Ended rejects input") {
  const Transition end = advance(at(Phase::kGoodbye), nlu_of(Intent::kAffirm), {});
  CHECK(end.state.phase == Phase::kEnded);
  CHECK(end.plan.empty());
  CHECK_THROWS_AS(advance(at(Phase::kEnded), nlu_of(Intent::kAffirm), {}),
                  std::invalid_argument);
}

TEST_CASE("render_response: reference examples") {
  ResponsePlan bye;
  bye.families = {"goodbye"};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::string text = render_response(bye, {}, {}, seed);
    CHECK(text.find("wash") != std::string::npos);
    CHECK(text.find("mask") != std::string::npos);
  }

  const Transition rec = advance(at(Phase::kAskGratitude),
                                 nlu_of(Intent::kGratitudeReport, {}, "my cat"), {});
  REQUIRE(rec.state.phase == Phase::kRecommendActivity);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const std::string text = render_response(rec.plan, rec.state.answers, {}, seed);
    const int hits = (text.find("yoga") != std::string::npos) +
                     (text.find("exercise") != std::string::npos) +
                     (text.find("meditation") != std::string::npos);
    CHECK(hits == 1);
  }

  Slots mood;
  mood.mood_word = "awful";
  const EmpathyScores sad{-0.8, 0.3, ExpressionClass::kSadness};
  const Transition ack = advance(at(Phase::kAskMood), nlu_of(Intent::kMoodReport, mood), sad);
  const auto& comfort = TemplateBank::builtin().variants("ack_mood:comfort");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::string text = render_response(ack.plan, ack.state.answers, sad, seed);
    const bool from_comfort = std::any_of(comfort.begin(), comfort.end(), [&](const auto& v) {
      return text.rfind(v, 0) == 0;
    });
    CHECK(from_comfort);
    CHECK(predict_expression(text, sad) == ExpressionClass::kSadness);
  }
}

TEST_CASE("render_response is deterministic per seed and reports missing slots") {
  ResponsePlan plan;
  plan.families = {"ack_profession"};
  Answers a;
  a.profession = "baker";
  CHECK(render_response(plan, a, {}, 42) == render_response(plan, a, {}, 42));
  CHECK_THROWS_AS(render_response(plan, {}, {}, 42), MissingSlot);
}

TEST_CASE("offered activity rotates with the day") {
  std::set<std::string> seen;
  for (int day = 0; day < 3; ++day) {
    DialogueState s = at(Phase::kAskGratitude);
    s.day_index = day;
    const Transition t = advance(s, nlu_of(Intent::kGratitudeReport), {});
    seen.insert(t.plan.params.at("activity"));
  }
  CHECK(seen == std::set<std::string>{"yoga", "exercise", "meditation"});
}

TEST_CASE("cooperative walk visits the whole flow for both kinds") {
  for (auto kind : {SessionKind::kFirstDay, SessionKind::kDaily}) {
    std::vector<SessionRecord> history;
    if (kind == SessionKind::kDaily) history.push_back(prior("2025-04-30"));
    Transition t = start_session("u1", kDay, history);
    std::vector<Phase> asked;
    const auto answer = [](Phase p) {
      Slots s;
      switch (p) {
        case Phase::kAskProfession:
          s.profession = "pilot";
          return nlu_of(Intent::kProfessionReport, s);
        case Phase::kAskMood:
          s.mood_word = "fine";
          return nlu_of(Intent::kMoodReport, s);
        case Phase::kAskTemperature:
          s.temperature_c = 36.6;
          return nlu_of(Intent::kTemperatureReport, s);
        case Phase::kAskBreath:
          s.polarity = Polarity::kNo;
          return nlu_of(Intent::kBreathReport, s);
        case Phase::kAskGratitude:
          return nlu_of(Intent::kGratitudeReport, s, "sunshine");
        case Phase::kRecommendActivity:
          return nlu_of(Intent::kAffirm, s);
        default:
          return nlu_of(Intent::kActivityFeedback, s);
      }
    };
    while (t.state.phase != Phase::kEnded) {
      const Phase phase = t.state.phase == Phase::kIntro ? t.plan.next : t.state.phase;
      CHECK(t.plan.next == phase);
      const std::string text = render_response(t.plan, t.state.answers, {}, 7);
      CHECK_FALSE(text.empty());
      asked.push_back(phase);
      t = advance(t.state, answer(phase), {});
    }
    // Every phase between the greeting and the end asks exactly once, in order.
    std::vector<Phase> want = phase_sequence(kind);
    want.erase(want.begin());
    want.pop_back();
    CHECK(asked == want);
    const Answers& a = t.state.answers;
    CHECK(a.mood.has_value());
    CHECK(a.temperature_c.has_value());
    CHECK(a.short_of_breath.has_value());
    CHECK(a.gratitude.has_value());
    CHECK(a.activity.has_value());
    CHECK(a.activity_feedback.has_value());
    CHECK(a.profession.has_value() == (kind == SessionKind::kFirstDay));
  }
}

TEST_CASE("random inputs never break the flow") {
  Rng rng(21);
  const std::vector<Intent> intents = {
      Intent::kAffirm,          Intent::kDeny,           Intent::kMoodReport,
      Intent::kTemperatureReport, Intent::kBreathReport, Intent::kProfessionReport,
      Intent::kGratitudeReport, Intent::kActivityFeedback, Intent::kFarewell,
      Intent::kUnknown};
  for (int run = 0; run < 500; ++run) {
    Transition t = start_session("u", kDay, {});
    int steps = 0;
    while (t.state.phase != Phase::kEnded) {
      Slots s;
      s.temperature_c = 36.0 + static_cast<double>(rng.below(30)) / 10.0;
      s.polarity = rng.below(2) ? Polarity::kYes : Polarity::kNo;
      s.profession = "cook";
      s.mood_word = "ok";
      const Intent intent = intents[rng.below(intents.size())];
      const double sentiment = rng.uniform01() * 2 - 1;
      CHECK_NOTHROW(render_response(t.plan, t.state.answers,
                                    {sentiment, 0.0, ExpressionClass::kNeutral}, rng.next()));
      t = advance(t.state, nlu_of(intent, s), {sentiment, 0.0, ExpressionClass::kNeutral});
      CHECK(t.state.retries <= kMaxRetries);
      REQUIRE(++steps < 40);
    }
  }
}

TEST_CASE("care notes and resume plans") {
  ResponsePlan plan;
  plan.families = {"ack_mood", "ask_temperature"};
  add_care_note(plan, CareFlag::kExtreme);
  CHECK(plan.families == std::vector<std::string>{"ack_mood", "care_extreme", "ask_temperature"});
  add_care_note(plan, CareFlag::kNone);
  CHECK(plan.families.size() == 3);

  const ResponsePlan r = resume_plan(at(Phase::kAskBreath));
  CHECK(r.families.front() == "resume");
  CHECK(contains(r.families, "ask_breath"));
  CHECK(r.next == Phase::kAskBreath);
  CHECK(format_temperature(37.0) == "37.0");
}
