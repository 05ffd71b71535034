#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>

#include "nora/rng.h"
#include "nora/session.h"
#include "session_driver.h"

using namespace nora;
using testing::ScriptedClient;

namespace {

RuntimeConfig seeded(std::uint64_t seed = 1) {
  RuntimeConfig c;
  c.seed = seed;
  return c;
}

std::string text_of(const WireMessage& m) { return m.payload.at("text").get<std::string>(); }

bool has_any(const std::string& text, const std::string& family) {
  const auto& vs = TemplateBank::builtin().variants(family);
  return std::any_of(vs.begin(), vs.end(),
                     [&](const std::string& v) { return text.find(v) != std::string::npos; });
}

void first_day(ScriptedClient& c, const std::string& user, const std::string& date) {
  c.hello(user, date);
  for (const char* a : {"I'm a teacher", "I feel fine", "36.6", "no",
                        "my garden", "sure", "it was relaxing"}) {
    c.say(a);
  }
  c.finish();
}

}  // namespace

TEST_CASE("hello on a fresh store starts a first-day session") {
  Store store;
  SessionHost host(store, seeded());
  ScriptedClient c(host);
  c.hello("u1", "2025-03-01");
  const auto started = c.of_type(msg::kSessionStarted);
  REQUIRE(started.size() == 1);
  CHECK(started[0].payload.at("kind") == "first_day");
  CHECK(started[0].payload.at("resumed") == false);
  CHECK(started[0].session_id == "u1/2025-03-01");
  const auto utt = c.of_type(msg::kSystemUtterance);
  REQUIRE(utt.size() == 1);
  CHECK(has_any(text_of(utt[0]), "ask_profession"));
  CHECK(store.data().users.count("u1") == 1);
}

TEST_CASE("protocol violations produce error messages") {
  Store store;
  SessionHost host(store, seeded());
  ScriptedClient c(host);
  c.send(0, msg::user_utterance("", "hello", 0));
  auto errors = c.of_type(msg::kError);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].payload.at("code") == "ProtocolError");

  c.send(10, WireMessage{"dance", "", nlohmann::json::object()});
  c.send(20, WireMessage{"hello", "", {{"user_id", ""}}});
  c.send(30, WireMessage{"hello", "", {{"user_id", "u"}, {"date", "2025-02-30"}}});
  c.send(40, WireMessage{"hello", "", {{"user_id", "u"}, {"render_nonverbal", "yes"}}});
  CHECK(c.of_type(msg::kError).size() == 5);
  CHECK_FALSE(c.connection().started());

  c.hello("u", "2025-03-01");
  c.send(c.now() + 10, msg::user_utterance("someone-else/2025-03-01", "hi", 0));
  errors = c.of_type(msg::kError);
  CHECK(errors.back().payload.at("code") == "UnknownSession");
  c.send(c.now() + 10, msg::hello("u", Date::parse("2025-03-01")));
  CHECK(c.of_type(msg::kError).back().payload.at("code") == "ProtocolError");
  c.send(c.now() + 10, WireMessage{"speech_event", "", {{"kind", "maybe"}}});
  CHECK(c.of_type(msg::kError).size() == 8);
}

TEST_CASE("scripted daily session with 8 user turns ends with a full summary") {
  Store store;
  SessionHost host(store, seeded());
  ScriptedClient day1(host);
  first_day(day1, "u1", "2025-03-01");
  REQUIRE(day1.connection().ended());

  ScriptedClient c(host);
  c.hello("u1", "2025-03-02");
  CHECK(c.of_type(msg::kSessionStarted)[0].payload.at("kind") == "daily");
  for (const char* a : {"hmm", "I'm feeling a bit tired", "let me check", "37.1", "no",
                        "my sister called", "okay", "I liked it"}) {
    c.say(a);
  }
  c.finish();
  REQUIRE(c.connection().ended());

  const auto ended = c.of_type(msg::kSessionEnded);
  REQUIRE(ended.size() == 1);
  const auto& summary = ended[0].payload.at("summary");
  CHECK(summary.at("user_turns") == 8);
  CHECK(summary.at("completed") == true);
  const auto& a = summary.at("answers");
  CHECK(a.contains("mood"));
  CHECK(a.at("temperature_c") == 37.1);
  CHECK(a.at("short_of_breath") == false);
  CHECK(a.contains("activity"));

  const SessionRecord* rec = store.data().find("u1", Date::parse("2025-03-02"));
  REQUIRE(rec != nullptr);
  CHECK(rec->completed);
  CHECK(store.data().timelines.at("u1").entries.size() == 2);
  for (const auto& t : rec->turns) {
    if (t.speaker == Speaker::kSystem) CHECK(t.expression.has_value());
    if (t.speaker == Speaker::kUser) CHECK(t.empathy.has_value());
  }
}

TEST_CASE("half-duplex: behaviors respect the floor") {
  Store store;
  SessionHost host(store, seeded(7));
  ScriptedClient c(host);
  first_day(c, "u2", "2025-03-01");
  REQUIRE(c.connection().ended());

  bool user_floor = false;
  int nods = 0, listening_on = 0;
  for (const auto& line : c.log()) {
    const auto& m = line.message;
    if (m.type == msg::kListening) {
      user_floor = m.payload.at("on").get<bool>();
      listening_on += user_floor;
    } else if (m.type == msg::kSystemUtterance) {
      CHECK_FALSE(user_floor);
    } else if (m.type == msg::kBehavior) {
      const std::string kind = m.payload.at("kind");
      if (kind == "nod") {
        CHECK(user_floor);
        ++nods;
      }
      if (kind == "gesture_start") CHECK_FALSE(user_floor);
      if (kind == "expression" && user_floor) CHECK(m.payload.at("expression") == "neutral");
    }
  }
  CHECK(listening_on == 7);
  CHECK(nods >= 7);
  for (std::size_t i = 1; i < c.log().size(); ++i) {
    CHECK(c.log()[i - 1].at_ms <= c.log()[i].at_ms);
  }
}

TEST_CASE("end of turn follows the last activity by the silence interval") {
  Store store;
  SessionHost host(store, seeded());
  ScriptedClient c(host);
  c.hello("u3", "2025-03-01");
  c.wait_for_floor();
  const std::string sid = c.connection().session_id();
  const std::int64_t t0 = c.now();
  c.send(t0 + 100, msg::speech_event(sid, true));
  c.send(t0 + 2600, msg::speech_event(sid, false));  // past 2 s while speaking
  c.send(t0 + 3000, msg::user_utterance(sid, "I'm a pilot", t0 + 3000));
  c.wait_for_floor();
  std::int64_t off = -1;
  for (const auto& l : c.log()) {
    if (l.message.type == msg::kListening && !l.message.payload.at("on").get<bool>()) off = l.at_ms;
  }
  // Outbound stamps are session time; the session started at caller time 0.
  CHECK(off == t0 + 5000);
}

TEST_CASE("render_nonverbal=false suppresses every behavior") {
  Store store;
  SessionHost host(store, seeded());
  ScriptedClient c(host);
  c.hello("u4", "2025-03-01", false);
  c.say("I'm a chef");
  c.say("great");
  CHECK(c.of_type(msg::kBehavior).empty());
  for (const auto& u : c.of_type(msg::kSystemUtterance)) {
    CHECK(u.payload.at("gesture_id").is_null());
  }
  CHECK(c.of_type(msg::kListening).size() >= 2);
}

TEST_CASE("a completed day cannot be repeated") {
  Store store;
  SessionHost host(store, seeded());
  ScriptedClient a(host);
  first_day(a, "u5", "2025-03-01");
  ScriptedClient b(host);
  b.hello("u5", "2025-03-01");
  const auto errors = b.of_type(msg::kError);
  REQUIRE(errors.size() == 1);
  CHECK(errors[0].payload.at("code") == "DuplicateSession");
  CHECK_FALSE(b.connection().started());
}

TEST_CASE("reconnecting resumes the same day") {
  Store store;
  SessionHost host(store, seeded());
  {
    ScriptedClient a(host);
    a.hello("u6", "2025-03-01");
    a.say("I'm a nurse");
    a.say("pretty good");
    a.wait_for_floor();
    a.send(a.now() + 10, msg::bye(a.connection().session_id()));
    CHECK(a.connection().closed());
  }
  const SessionRecord* partial = store.data().find("u6", Date::parse("2025-03-01"));
  REQUIRE(partial != nullptr);
  CHECK_FALSE(partial->completed);

  ScriptedClient b(host);
  b.hello("u6", "2025-03-01");
  const auto started = b.of_type(msg::kSessionStarted);
  REQUIRE(started.size() == 1);
  CHECK(started[0].payload.at("resumed") == true);
  const auto first = b.of_type(msg::kSystemUtterance).at(0);
  CHECK(first.payload.at("phase") == "ask_temperature");
  CHECK(has_any(text_of(first), "resume"));
  CHECK(has_any(text_of(first), "ask_temperature"));

  for (const char* a : {"36.9", "no", "my friends", "okay", "it was fun"}) b.say(a);
  b.finish();
  REQUIRE(b.connection().ended());
  const SessionRecord* done = store.data().find("u6", Date::parse("2025-03-01"));
  CHECK(done->completed);
  CHECK(done->answers.profession == "nurse");
  CHECK(done->answers.temperature_c == 36.9);
  CHECK(store.data().users.at("u6").profession == "nurse");
}

TEST_CASE("text typed while the system speaks is kept for the user turn") {
  Store store;
  SessionHost host(store, seeded());
  ScriptedClient c(host);
  c.hello("u7", "2025-03-01");
  c.send(100, msg::user_utterance(c.connection().session_id(), "I'm a welder", 100));
  c.wait_for_floor();
  const auto utts = c.of_type(msg::kSystemUtterance);
  REQUIRE(utts.size() == 2);
  CHECK(text_of(utts[1]).find("welder") != std::string::npos);
}

TEST_CASE("distress adds a care note once") {
  Store store;
  SessionHost host(store, seeded());
  ScriptedClient c(host);
  c.hello("u8", "2025-03-01");
  c.say("I'm a driver");
  c.say("I feel terrible and hopeless, so stressed and anxious");
  c.say("36.7");
  c.say("I'm miserable and stressed");
  c.wait_for_floor();
  const auto utts = c.of_type(msg::kSystemUtterance);
  REQUIRE(utts.size() == 5);
  CHECK(has_any(text_of(utts[2]), "care_extreme"));
  CHECK(utts[2].payload.at("expression") == "sadness");
  CHECK_FALSE(has_any(text_of(utts[4]), "care_extreme"));
}

TEST_CASE("farewell short-circuits to goodbye") {
  Store store;
  SessionHost host(store, seeded());
  ScriptedClient c(host);
  c.hello("u9", "2025-03-01");
  c.say("I'm a clerk");
  c.say("goodbye");
  c.finish();
  CHECK(c.connection().ended());
  const auto utts = c.of_type(msg::kSystemUtterance);
  const std::string last = text_of(utts.back());
  CHECK(last.find("wash") != std::string::npos);
  CHECK(last.find("mask") != std::string::npos);
  CHECK(c.of_type(msg::kSessionEnded).size() == 1);
  c.send(c.now() + 10, msg::user_utterance(c.connection().session_id(), "hi", 0));
  CHECK(c.of_type(msg::kError).size() == 1);
}

TEST_CASE("replay is deterministic and seed-sensitive") {
  std::ifstream in(NORA_GOLDEN_DIR "/checkin.trace");
  REQUIRE(in.good());
  const auto inbound = read_trace(in);
  auto run = [&](std::uint64_t seed) {
    Store store;
    SessionHost host(store, seeded(seed));
    std::ostringstream out;
    write_trace(out, replay(inbound, host));
    return out.str();
  };
  const std::string a = run(1);
  CHECK(a == run(1));
  CHECK(a != run(2));
  CHECK(a.find("session_ended") != std::string::npos);
}
