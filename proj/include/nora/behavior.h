#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "nora/common.h"
#include "nora/rng.h"

namespace nora {

/// Timing and geometry of the nonverbal behaviors. Defaults reproduce the
/// android's settings; nod_period_s has no published value.
struct BehaviorConfig {
  double silence_end_of_turn_s = 2.0;
  double gaze_interval_s = 1.5;
  double gaze_outer_radius_m = 0.3;
  double gaze_inner_radius_m = 0.05;
  double gaze_width_m = 0.2;
  int gesture_count = 4;
  double nod_period_s = 1.0;

  /// Throws InvalidConfig unless 0 < inner < outer, width > 0, every
  /// interval > 0 and gesture_count >= 1.
  void validate() const;

  std::int64_t silence_ms() const;
  std::int64_t gaze_interval_ms() const;
  std::int64_t nod_period_ms() const;
};

/// Camera-centered frame: x right and y up in the camera plane, z along the
/// camera axis. Meters.
struct GazePoint {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double radius() const;
  bool operator==(const GazePoint&) const = default;
};

/// Inverse-CDF map from three unit draws to a point of the hollow cylinder:
/// r = sqrt(u (R_out^2 - R_in^2) + R_in^2), angle theta, z = (v - 1/2) width.
GazePoint gaze_point_from_draws(double u, double theta, double v,
                                const BehaviorConfig& config);

/// Uniform sample over the volume of the hollow cylinder around the camera.
GazePoint sample_gaze_point(Rng& rng, const BehaviorConfig& config);

/// Uniform gesture id in [0, gesture_count).
int select_gesture(Rng& rng, const BehaviorConfig& config);

enum class BehaviorKind {
  kGaze,
  kNod,
  kGestureStart,
  kGestureEnd,
  kListeningOn,
  kListeningOff,
  kExpression,
};

std::string_view to_string(BehaviorKind k);
std::optional<BehaviorKind> parse_behavior_kind(std::string_view name);

struct BehaviorEvent {
  std::int64_t at_ms = 0;
  BehaviorKind kind = BehaviorKind::kNod;
  GazePoint gaze;    // kGaze
  int gesture_id = 0;  // kGestureStart
  ExpressionClass expression = ExpressionClass::kNeutral;  // kExpression

  static BehaviorEvent make_gaze(std::int64_t at, GazePoint p);
  static BehaviorEvent make(std::int64_t at, BehaviorKind k);
  static BehaviorEvent make_gesture(std::int64_t at, int id);
  static BehaviorEvent make_expression(std::int64_t at, ExpressionClass e);

  /// Kind-specific payload as compact JSON text ("{}" for bare kinds).
  std::string payload_json() const;
  static BehaviorEvent from_payload(std::int64_t at, BehaviorKind kind,
                                    std::string_view payload_json);

  bool operator==(const BehaviorEvent&) const = default;
};

/// Behavior trace file: one event per line, at_ms<TAB>kind<TAB>payload-json.
void write_behavior_trace(std::ostream& out, const std::vector<BehaviorEvent>& events);
std::vector<BehaviorEvent> read_behavior_trace(std::istream& in);

/// Discrete clock. Every timer fires on the first tick at or after its due
/// time, so timing error is below one tick.
class TickClock {
 public:
  explicit TickClock(std::int64_t tick_ms);

  std::int64_t tick_ms() const { return tick_ms_; }
  /// First tick boundary >= t.
  std::int64_t ceil(std::int64_t t) const;

 private:
  std::int64_t tick_ms_;
};

/// Emits a gaze change every gaze_interval_s from `start_ms`, independent of
/// the turn. Due times do not drift: the k-th event is due at start + k*interval.
class GazeScheduler {
 public:
  GazeScheduler(const BehaviorConfig& config, std::uint64_t seed,
                std::int64_t start_ms = 0);

  /// Events due at or before `now_ms`, stamped with `now_ms`.
  std::vector<BehaviorEvent> advance_to(std::int64_t now_ms);

 private:
  BehaviorConfig config_;
  Rng rng_;
  std::int64_t interval_ms_;
  std::int64_t next_due_;
};

enum class SpeechActivity { kUserSpeechStart, kUserSpeechStop, kUserTextFinal };

/// Active-listening nods and silence-based end-of-turn detection for one user
/// turn. Nods run every nod_period_s from the first activity of the turn. Once
/// the user is not speaking, the turn ends silence_end_of_turn_s after the
/// latest activity; any new activity restarts that timer.
class NodController {
 public:
  explicit NodController(const BehaviorConfig& config);

  void open_turn(std::int64_t at_ms);
  /// Ignored while no turn is open.
  void on_activity(SpeechActivity activity, std::int64_t at_ms);

  struct Output {
    std::vector<BehaviorEvent> nods;
    std::optional<std::int64_t> end_of_turn;  // tick at which the turn closed
  };
  Output advance_to(std::int64_t now_ms);

  bool open() const { return open_; }
  bool heard_activity() const { return last_activity_.has_value(); }
  std::optional<std::int64_t> last_activity() const { return last_activity_; }
  /// Time the silence timer will expire, if it is running.
  std::optional<std::int64_t> end_of_turn_due() const;

 private:
  std::int64_t silence_ms_;
  std::int64_t nod_period_ms_;
  bool open_ = false;
  bool speaking_ = false;
  std::optional<std::int64_t> last_activity_;
  std::int64_t next_nod_ = 0;
};

enum class TurnHolder { kSystem, kUser };

struct TurnState {
  TurnHolder holder = TurnHolder::kSystem;
  std::optional<std::int64_t> last_user_activity;  // only while holder == User
};

/// Turn-conditioned behavior stream for one session: gestures and an
/// expression while the system speaks, nods while the user holds the turn,
/// gaze changes throughout. Driven by explicit timestamps only.
class BehaviorController {
 public:
  BehaviorController(const BehaviorConfig& config, std::uint64_t seed,
                     std::int64_t start_ms = 0);

  /// Starts a system utterance. Returns [Expression, GestureStart]; the chosen
  /// gesture id is in the GestureStart event. Requires holder == System.
  std::vector<BehaviorEvent> begin_system_turn(std::int64_t at_ms,
                                               ExpressionClass expression);
  /// Ends the utterance: [GestureEnd, Expression(neutral)].
  std::vector<BehaviorEvent> end_system_turn(std::int64_t at_ms);
  /// Hands the floor to the user: [ListeningOn].
  std::vector<BehaviorEvent> open_user_turn(std::int64_t at_ms);

  void on_activity(SpeechActivity activity, std::int64_t at_ms);

  struct TickOutput {
    std::vector<BehaviorEvent> events;  // gaze, nods, ListeningOff
    std::optional<std::int64_t> end_of_turn;
  };
  /// Processes one clock tick. On end of turn the floor returns to the system.
  TickOutput tick(std::int64_t now_ms);

  /// Stops the gaze stream (session over).
  void stop() { stopped_ = true; }

  const TurnState& turn() const { return turn_; }
  bool speaking() const { return system_speaking_; }
  const NodController& nods() const { return nod_; }

 private:
  BehaviorConfig config_;
  GazeScheduler gaze_;
  Rng gesture_rng_;
  NodController nod_;
  TurnState turn_;
  bool system_speaking_ = false;
  bool stopped_ = false;
};

}  // namespace nora
