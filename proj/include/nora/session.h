#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nora/behavior.h"
#include "nora/config.h"
#include "nora/dialogue.h"
#include "nora/store.h"
#include "nora/wire.h"

namespace nora {

/// State shared by all connections of one service instance.
class SessionHost {
 public:
  SessionHost(Store& store, RuntimeConfig config,
              std::shared_ptr<const Resources> resources = nullptr);

  Store& store() { return *store_; }
  const RuntimeConfig& config() const { return config_; }
  const Resources& resources() const { return *resources_; }

 private:
  Store* store_;
  RuntimeConfig config_;
  std::shared_ptr<const Resources> resources_;
};

/// Summary sent in session_ended.
nlohmann::json session_summary(const SessionRecord& record);

/// Protocol state machine for one client connection, hence one session.
///
/// All input carries an explicit timestamp in the caller's clock (ms); the
/// connection runs a discrete clock of config.tick_ms from its hello, and all
/// outbound lines are stamped in session time. The same inputs and seed give
/// the same outbound lines, which is what replay relies on.
class Connection {
 public:
  explicit Connection(SessionHost& host);

  /// Advances the clock to `at_ms`, then handles `message`. Protocol
  /// violations produce an `error` message; the connection stays usable.
  std::vector<TraceLine> handle(std::int64_t at_ms, const WireMessage& message);

  /// Processes every clock tick up to `at_ms`.
  std::vector<TraceLine> advance_to(std::int64_t at_ms);

  /// Runs the clock until the session ends, waits for the user to speak, or
  /// `horizon_ms` passes.
  std::vector<TraceLine> drain(std::int64_t horizon_ms);

  /// Transport went away (or bye). The last snapshot is already persisted.
  void disconnect();

  bool started() const { return started_; }
  bool ended() const { return ended_; }
  bool closed() const { return closed_; }
  /// The user holds the floor and has not produced any activity yet.
  bool awaiting_user() const;
  /// Caller-clock time of the last processed tick.
  std::int64_t now() const { return origin_ + last_tick_; }

  const std::string& session_id() const { return session_id_; }
  const SessionRecord& record() const { return record_; }
  const DialogueState& state() const { return state_; }

 private:
  void on_hello(std::int64_t at_ms, const WireMessage& m, std::vector<TraceLine>& out);
  void on_user_utterance(std::int64_t t, const WireMessage& m);
  void on_speech_event(std::int64_t t, const WireMessage& m);

  void tick(std::int64_t t, std::vector<TraceLine>& out);
  void finish_system_turn(std::int64_t t, std::vector<TraceLine>& out);
  void open_user_turn(std::int64_t t, std::vector<TraceLine>& out);
  void respond(std::int64_t t, std::vector<TraceLine>& out);
  void speak(std::int64_t t, ResponsePlan plan, const EmpathyScores& empathy,
             std::vector<TraceLine>& out);
  void activity(SpeechActivity a, std::int64_t t);
  void emit(std::int64_t t, WireMessage m, std::vector<TraceLine>& out);
  void emit_behavior(const std::vector<BehaviorEvent>& events, std::vector<TraceLine>& out);
  std::int64_t utterance_ms(const std::string& text) const;
  void rebuild_state(const SessionRecord& existing);

  SessionHost* host_;
  TickClock clock_;

  bool started_ = false;
  bool ended_ = false;
  bool closed_ = false;
  bool nonverbal_ = true;

  std::string session_id_;
  std::int64_t origin_ = 0;     // caller-clock time of session time 0
  std::int64_t last_tick_ = 0;  // session time

  DialogueState state_;
  SessionRecord record_;
  MoodTimeline timeline_;
  CareFlag care_noted_ = CareFlag::kNone;

  std::optional<BehaviorController> behavior_;
  std::optional<Rng> template_rng_;
  std::optional<std::int64_t> speech_end_;  // session time

  std::string turn_text_;
  std::optional<std::int64_t> last_activity_;
  std::vector<std::string> held_text_;  // typed while the system had the floor
};

/// Headless replay. A `hello` line opens a new connection (the previous one
/// is drained and disconnected first). Each line's at_ms is in that
/// connection's clock.
std::vector<TraceLine> replay(const std::vector<TraceLine>& inbound, SessionHost& host);

/// Drain horizon used by replay after the last line of a connection.
inline constexpr std::int64_t kReplayDrainMs = 10 * 60 * 1000;

}  // namespace nora
