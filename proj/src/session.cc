#include "nora/session.h"

#include <algorithm>
#include <sstream>

#include "nora/expression.h"
#include "nora/nlu.h"

namespace nora {

using nlohmann::json;

namespace {

std::size_t word_count(const std::string& s) {
  std::istringstream in(s);
  std::size_t n = 0;
  std::string w;
  while (in >> w) ++n;
  return n;
}

std::string payload_string(const WireMessage& m, const char* key) {
  auto it = m.payload.find(key);
  if (it == m.payload.end() || !it->is_string()) {
    throw ProtocolError(m.type + " needs a string '" + key + "'");
  }
  return it->get<std::string>();
}

}  // namespace

SessionHost::SessionHost(Store& store, RuntimeConfig config,
                         std::shared_ptr<const Resources> resources)
    : store_(&store),
      config_(std::move(config)),
      resources_(resources ? std::move(resources) : Resources::load(config_)) {
  config_.validate();
}

json session_summary(const SessionRecord& record) {
  std::size_t user_turns = 0;
  for (const auto& t : record.turns) user_turns += t.speaker == Speaker::kUser;
  return json{{"kind", to_string(record.kind)},
              {"date", record.date.iso()},
              {"completed", record.completed},
              {"user_turns", user_turns},
              {"answers", answers_to_json(record.answers)}};
}

Connection::Connection(SessionHost& host)
    : host_(&host), clock_(host.config().tick_ms) {}

bool Connection::awaiting_user() const {
  return started_ && !ended_ && !closed_ && behavior_ &&
         behavior_->turn().holder == TurnHolder::kUser &&
         !behavior_->nods().heard_activity();
}

std::vector<TraceLine> Connection::handle(std::int64_t at_ms, const WireMessage& m) {
  std::vector<TraceLine> out = advance_to(at_ms);
  const std::int64_t t = started_ ? std::max<std::int64_t>(at_ms - origin_, 0) : at_ms;
  try {
    if (closed_) throw ProtocolError("connection is closed");
    if (m.type == msg::kHello) {
      if (started_) throw ProtocolError("duplicate hello on this connection");
      on_hello(at_ms, m, out);
      return out;
    }
    if (m.type != msg::kUserUtterance && m.type != msg::kSpeechEvent &&
        m.type != msg::kBye) {
      throw ProtocolError("unknown message type '" + m.type + "'");
    }
    if (!started_) throw ProtocolError(m.type + " before hello");
    if (!m.session_id.empty() && m.session_id != session_id_) {
      throw UnknownSession("unknown session '" + m.session_id + "'");
    }
    if (m.type == msg::kBye) {
      disconnect();
    } else if (ended_) {
      throw ProtocolError("session has ended");
    } else if (m.type == msg::kUserUtterance) {
      on_user_utterance(t, m);
    } else {
      on_speech_event(t, m);
    }
  } catch (const UnknownSession& e) {
    emit(t, msg::error(session_id_, "UnknownSession", e.what()), out);
  } catch (const DuplicateSession& e) {
    emit(t, msg::error(session_id_, "DuplicateSession", e.what()), out);
  } catch (const ProtocolError& e) {
    emit(t, msg::error(session_id_, "ProtocolError", e.what()), out);
  }
  return out;
}

void Connection::on_hello(std::int64_t at_ms, const WireMessage& m,
                          std::vector<TraceLine>& out) {
  const std::string user_id = payload_string(m, "user_id");
  if (user_id.empty()) throw ProtocolError("hello needs a non-empty user_id");
  Date date = Date::today();
  if (auto d = m.payload.find("date"); d != m.payload.end() && !d->is_null()) {
    try {
      date = Date::parse(d->get<std::string>());
    } catch (const std::exception& e) {
      throw ProtocolError(std::string("hello has a bad date: ") + e.what());
    }
  }
  if (auto nv = m.payload.find("render_nonverbal"); nv != m.payload.end()) {
    if (!nv->is_boolean()) throw ProtocolError("render_nonverbal must be a boolean");
    nonverbal_ = nv->get<bool>();
  }

  Store& store = host_->store();
  const SessionRecord* existing = store.data().find(user_id, date);
  if (existing && existing->completed) {
    throw DuplicateSession("session for '" + user_id + "' on " + date.iso() +
                           " is already complete");
  }

  session_id_ = user_id + "/" + date.iso();
  const std::uint64_t seed = Rng::derive(host_->config().seed, session_id_);
  template_rng_.emplace(Rng::derive(seed, "templates"));
  if (auto it = store.data().timelines.find(user_id); it != store.data().timelines.end()) {
    timeline_ = it->second;
  } else {
    timeline_ = MoodTimeline{user_id, {}};
  }

  std::int64_t resume_at = 0;
  ResponsePlan plan;
  if (existing) {
    record_ = *existing;
    rebuild_state(*existing);
    if (!record_.turns.empty()) {
      resume_at = clock_.ceil(record_.turns.back().timestamp_ms + 1);
    }
    plan = resume_plan(state_);
  } else {
    Transition start = start_session(user_id, date, store.data().history(user_id, date));
    state_ = start.state;
    plan = std::move(start.plan);
    record_ = SessionRecord{user_id, date, state_.kind, {}, {}, false};
    if (!store.data().users.contains(user_id)) {
      store.put_user(user_id, UserProfile{std::nullopt, date});
    }
  }

  started_ = true;
  origin_ = at_ms - resume_at;
  last_tick_ = resume_at;
  behavior_.emplace(host_->config().behavior, seed, resume_at);

  emit(resume_at, msg::session_started(session_id_, to_string(state_.kind), existing != nullptr),
       out);
  speak(resume_at, std::move(plan), EmpathyScores{}, out);
}

void Connection::rebuild_state(const SessionRecord& existing) {
  const Understander nlu(host_->resources().rules);
  state_ = start_session(existing.user_id, existing.date,
                         host_->store().data().history(existing.user_id, existing.date))
               .state;
  for (const auto& turn : existing.turns) {
    if (turn.speaker != Speaker::kUser || state_.phase == Phase::kEnded) continue;
    const EmpathyScores empathy =
        turn.empathy.value_or(score_turn(turn.text, host_->resources().lexicons));
    state_ = advance(state_, nlu.understand(turn.text, state_.phase), empathy).state;
  }
}

void Connection::on_user_utterance(std::int64_t t, const WireMessage& m) {
  const std::string text = payload_string(m, "text");
  if (behavior_->turn().holder != TurnHolder::kUser) {
    held_text_.push_back(text);
    return;
  }
  if (!turn_text_.empty() && !text.empty()) turn_text_.push_back(' ');
  turn_text_ += text;
  activity(SpeechActivity::kUserTextFinal, t);
}

void Connection::on_speech_event(std::int64_t t, const WireMessage& m) {
  const std::string kind = payload_string(m, "kind");
  if (kind != "start" && kind != "stop") {
    throw ProtocolError("speech_event kind must be start or stop");
  }
  activity(kind == "start" ? SpeechActivity::kUserSpeechStart
                           : SpeechActivity::kUserSpeechStop,
           t);
}

void Connection::activity(SpeechActivity a, std::int64_t t) {
  if (behavior_->turn().holder != TurnHolder::kUser) return;
  behavior_->on_activity(a, t);
  last_activity_ = t;
}

std::vector<TraceLine> Connection::advance_to(std::int64_t at_ms) {
  std::vector<TraceLine> out;
  if (!started_ || ended_ || closed_) return out;
  const std::int64_t target = at_ms - origin_;
  for (std::int64_t t = last_tick_ + clock_.tick_ms(); t <= target;
       t += clock_.tick_ms()) {
    last_tick_ = t;
    tick(t, out);
    if (ended_) break;
  }
  return out;
}

std::vector<TraceLine> Connection::drain(std::int64_t horizon_ms) {
  std::vector<TraceLine> out;
  while (started_ && !ended_ && !closed_ && !awaiting_user() && now() < horizon_ms) {
    auto step = advance_to(now() + clock_.tick_ms());
    out.insert(out.end(), step.begin(), step.end());
  }
  return out;
}

void Connection::disconnect() {
  if (started_ && !ended_ && !closed_) host_->store().put_session(record_);
  closed_ = true;
}

void Connection::tick(std::int64_t t, std::vector<TraceLine>& out) {
  if (speech_end_ && *speech_end_ <= t) finish_system_turn(t, out);
  if (ended_) return;

  auto step = behavior_->tick(t);
  emit_behavior(step.events, out);
  if (step.end_of_turn) {
    emit(t, msg::listening(session_id_, false), out);
    respond(t, out);
  }
}

void Connection::finish_system_turn(std::int64_t t, std::vector<TraceLine>& out) {
  speech_end_.reset();
  emit_behavior(behavior_->end_system_turn(t), out);

  if (state_.phase != Phase::kGoodbye) {
    open_user_turn(t, out);
    return;
  }
  state_ = advance(state_, NluResult{}, EmpathyScores{}).state;
  record_.completed = true;
  record_.answers = state_.answers;

  Store& store = host_->store();
  store.put_session(record_);
  store.add_to_timeline(record_);
  behavior_->stop();
  ended_ = true;
  emit(t, msg::session_ended(session_id_, session_summary(record_)), out);
}

void Connection::open_user_turn(std::int64_t t, std::vector<TraceLine>& out) {
  turn_text_.clear();
  last_activity_.reset();
  emit_behavior(behavior_->open_user_turn(t), out);
  emit(t, msg::listening(session_id_, true), out);
  if (!held_text_.empty()) {
    for (const auto& text : held_text_) {
      if (!turn_text_.empty() && !text.empty()) turn_text_.push_back(' ');
      turn_text_ += text;
    }
    held_text_.clear();
    activity(SpeechActivity::kUserTextFinal, t);
  }
}

void Connection::respond(std::int64_t t, std::vector<TraceLine>& out) {
  const Resources& res = host_->resources();
  const EmpathyScores empathy = score_turn(turn_text_, res.lexicons);
  const NluResult nlu = Understander(res.rules).understand(turn_text_, state_.phase);

  record_.turns.push_back(TurnRecord{Speaker::kUser, turn_text_,
                                     last_activity_.value_or(t - 1), empathy,
                                     std::nullopt});
  Transition next = advance(state_, nlu, empathy);
  state_ = next.state;
  record_.answers = state_.answers;

  if (record_.answers.profession) {
    Store& store = host_->store();
    UserProfile profile = store.data().users.at(record_.user_id);
    if (profile.profession != record_.answers.profession) {
      profile.profession = record_.answers.profession;
      store.put_user(record_.user_id, profile);
    }
  }

  const CareFlag flag = detect_extreme(timeline_, empathy, host_->config().care);
  if (flag > care_noted_) {
    add_care_note(next.plan, flag);
    care_noted_ = flag;
  }
  turn_text_.clear();
  speak(t, std::move(next.plan), empathy, out);
}

void Connection::speak(std::int64_t t, ResponsePlan plan, const EmpathyScores& empathy,
                       std::vector<TraceLine>& out) {
  const Resources& res = host_->resources();
  const std::string text =
      render_response(plan, state_.answers, empathy, template_rng_->next(), res.templates);
  const ExpressionClass expression = predict_expression(text, empathy, res.lexicons);

  record_.turns.push_back(
      TurnRecord{Speaker::kSystem, text, t, std::nullopt, expression});

  const auto events = behavior_->begin_system_turn(t, expression);
  const int gesture = events.back().gesture_id;
  emit(t,
       msg::system_utterance(session_id_, text, expression,
                             nonverbal_ ? std::optional<int>(gesture) : std::nullopt,
                             state_.phase, plan.next),
       out);
  emit_behavior(events, out);

  speech_end_ = clock_.ceil(t + utterance_ms(text));
  host_->store().put_session(record_);
}

std::int64_t Connection::utterance_ms(const std::string& text) const {
  const auto& c = host_->config();
  return std::max<std::int64_t>(c.min_utterance_ms,
                                static_cast<std::int64_t>(word_count(text)) * c.ms_per_word);
}

void Connection::emit(std::int64_t t, WireMessage m, std::vector<TraceLine>& out) {
  out.push_back(TraceLine{t, std::move(m)});
}

void Connection::emit_behavior(const std::vector<BehaviorEvent>& events,
                               std::vector<TraceLine>& out) {
  if (!nonverbal_) return;
  for (const auto& e : events) emit(e.at_ms, msg::behavior(session_id_, e), out);
}

std::vector<TraceLine> replay(const std::vector<TraceLine>& inbound, SessionHost& host) {
  std::vector<TraceLine> out;
  std::unique_ptr<Connection> conn;
  auto append = [&out](std::vector<TraceLine> lines) {
    out.insert(out.end(), std::make_move_iterator(lines.begin()),
               std::make_move_iterator(lines.end()));
  };
  auto finish = [&] {
    if (!conn) return;
    append(conn->drain(conn->now() + kReplayDrainMs));
    conn->disconnect();
    conn.reset();
  };

  for (const auto& line : inbound) {
    if (line.message.type == msg::kHello || !conn) {
      finish();
      conn = std::make_unique<Connection>(host);
    }
    append(conn->handle(line.at_ms, line.message));
  }
  finish();
  return out;
}

}  // namespace nora
