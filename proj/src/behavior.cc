#include "nora/behavior.h"

#include <array>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace nora {

namespace {

constexpr std::array<std::string_view, 7> kKindNames = {
    "gaze", "nod", "gesture_start", "gesture_end",
    "listening_on", "listening_off", "expression"};

std::int64_t to_ms(double seconds) {
  return static_cast<std::int64_t>(std::llround(seconds * 1000.0));
}

}  // namespace

void BehaviorConfig::validate() const {
  if (!(gaze_inner_radius_m > 0.0) || !(gaze_inner_radius_m < gaze_outer_radius_m)) {
    throw InvalidConfig("gaze radii must satisfy 0 < inner < outer");
  }
  if (!(gaze_width_m > 0.0)) throw InvalidConfig("gaze width must be positive");
  if (!(silence_end_of_turn_s > 0.0) || !(gaze_interval_s > 0.0) ||
      !(nod_period_s > 0.0)) {
    throw InvalidConfig("behavior time intervals must be positive");
  }
  if (to_ms(silence_end_of_turn_s) <= 0 || to_ms(gaze_interval_s) <= 0 ||
      to_ms(nod_period_s) <= 0) {
    throw InvalidConfig("behavior time intervals must be at least 1 ms");
  }
  if (gesture_count < 1) throw InvalidConfig("gesture_count must be at least 1");
}

std::int64_t BehaviorConfig::silence_ms() const { return to_ms(silence_end_of_turn_s); }
std::int64_t BehaviorConfig::gaze_interval_ms() const { return to_ms(gaze_interval_s); }
std::int64_t BehaviorConfig::nod_period_ms() const { return to_ms(nod_period_s); }

double GazePoint::radius() const { return std::hypot(x, y); }

GazePoint gaze_point_from_draws(double u, double theta, double v,
                                const BehaviorConfig& c) {
  const double inner2 = c.gaze_inner_radius_m * c.gaze_inner_radius_m;
  const double outer2 = c.gaze_outer_radius_m * c.gaze_outer_radius_m;
  const double r = std::sqrt(u * (outer2 - inner2) + inner2);
  return GazePoint{r * std::cos(theta), r * std::sin(theta),
                   (v - 0.5) * c.gaze_width_m};
}

GazePoint sample_gaze_point(Rng& rng, const BehaviorConfig& config) {
  config.validate();
  const double theta = 2.0 * std::numbers::pi * rng.uniform01();
  const double u = rng.uniform01();
  const double v = rng.uniform01();
  return gaze_point_from_draws(u, theta, v, config);
}

int select_gesture(Rng& rng, const BehaviorConfig& config) {
  if (config.gesture_count < 1) throw InvalidConfig("gesture_count must be at least 1");
  return static_cast<int>(rng.below(static_cast<std::uint64_t>(config.gesture_count)));
}

std::string_view to_string(BehaviorKind k) {
  return kKindNames[static_cast<std::size_t>(k)];
}

std::optional<BehaviorKind> parse_behavior_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<BehaviorKind>(i);
  }
  return std::nullopt;
}

BehaviorEvent BehaviorEvent::make_gaze(std::int64_t at, GazePoint p) {
  BehaviorEvent e = make(at, BehaviorKind::kGaze);
  e.gaze = p;
  return e;
}

BehaviorEvent BehaviorEvent::make(std::int64_t at, BehaviorKind k) {
  BehaviorEvent e;
  e.at_ms = at;
  e.kind = k;
  return e;
}

BehaviorEvent BehaviorEvent::make_gesture(std::int64_t at, int id) {
  BehaviorEvent e = make(at, BehaviorKind::kGestureStart);
  e.gesture_id = id;
  return e;
}

BehaviorEvent BehaviorEvent::make_expression(std::int64_t at, ExpressionClass x) {
  BehaviorEvent e = make(at, BehaviorKind::kExpression);
  e.expression = x;
  return e;
}

std::string BehaviorEvent::payload_json() const {
  nlohmann::json j = nlohmann::json::object();
  switch (kind) {
    case BehaviorKind::kGaze:
      j["x"] = gaze.x;
      j["y"] = gaze.y;
      j["z"] = gaze.z;
      break;
    case BehaviorKind::kGestureStart:
      j["id"] = gesture_id;
      break;
    case BehaviorKind::kExpression:
      j["expression"] = std::string(to_string(expression));
      break;
    default:
      break;
  }
  return j.dump();
}

BehaviorEvent BehaviorEvent::from_payload(std::int64_t at, BehaviorKind kind,
                                          std::string_view payload) {
  const auto j = nlohmann::json::parse(payload);
  BehaviorEvent e = make(at, kind);
  switch (kind) {
    case BehaviorKind::kGaze:
      e.gaze = {j.at("x").get<double>(), j.at("y").get<double>(),
                j.at("z").get<double>()};
      break;
    case BehaviorKind::kGestureStart:
      e.gesture_id = j.at("id").get<int>();
      break;
    case BehaviorKind::kExpression: {
      auto x = parse_expression(j.at("expression").get<std::string>());
      if (!x) throw std::invalid_argument("unknown expression in behavior payload");
      e.expression = *x;
      break;
    }
    default:
      break;
  }
  return e;
}

void write_behavior_trace(std::ostream& out, const std::vector<BehaviorEvent>& events) {
  for (const auto& e : events) {
    out << e.at_ms << '\t' << to_string(e.kind) << '\t' << e.payload_json() << '\n';
  }
}

std::vector<BehaviorEvent> read_behavior_trace(std::istream& in) {
  std::vector<BehaviorEvent> events;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw std::invalid_argument("bad behavior trace line");
    auto kind = parse_behavior_kind(line.substr(t1 + 1, t2 - t1 - 1));
    if (!kind) throw std::invalid_argument("unknown behavior kind in trace");
    events.push_back(BehaviorEvent::from_payload(std::stoll(line.substr(0, t1)), *kind,
                                                 line.substr(t2 + 1)));
  }
  return events;
}

TickClock::TickClock(std::int64_t tick_ms) : tick_ms_(tick_ms) {
  if (tick_ms <= 0) throw InvalidConfig("tick must be positive");
}

std::int64_t TickClock::ceil(std::int64_t t) const {
  const std::int64_t q = t / tick_ms_;
  const std::int64_t base = q * tick_ms_;
  return base >= t ? base : base + tick_ms_;
}

GazeScheduler::GazeScheduler(const BehaviorConfig& config, std::uint64_t seed,
                             std::int64_t start_ms)
    : config_(config),
      rng_(seed),
      interval_ms_(config.gaze_interval_ms()),
      next_due_(start_ms + config.gaze_interval_ms()) {
  config_.validate();
}

std::vector<BehaviorEvent> GazeScheduler::advance_to(std::int64_t now_ms) {
  std::vector<BehaviorEvent> out;
  while (next_due_ <= now_ms) {
    out.push_back(BehaviorEvent::make_gaze(now_ms, sample_gaze_point(rng_, config_)));
    next_due_ += interval_ms_;
  }
  return out;
}

NodController::NodController(const BehaviorConfig& config)
    : silence_ms_(config.silence_ms()), nod_period_ms_(config.nod_period_ms()) {}

void NodController::open_turn(std::int64_t) {
  open_ = true;
  speaking_ = false;
  last_activity_.reset();
}

void NodController::on_activity(SpeechActivity activity, std::int64_t at_ms) {
  if (!open_) return;
  if (!last_activity_) next_nod_ = at_ms + nod_period_ms_;
  last_activity_ = at_ms;
  switch (activity) {
    case SpeechActivity::kUserSpeechStart:
      speaking_ = true;
      break;
    case SpeechActivity::kUserSpeechStop:
    case SpeechActivity::kUserTextFinal:
      speaking_ = false;
      break;
  }
}

std::optional<std::int64_t> NodController::end_of_turn_due() const {
  if (!open_ || !last_activity_ || speaking_) return std::nullopt;
  return *last_activity_ + silence_ms_;
}

NodController::Output NodController::advance_to(std::int64_t now_ms) {
  Output out;
  if (!open_ || !last_activity_) return out;
  const auto due = end_of_turn_due();
  while (next_nod_ <= now_ms && (!due || next_nod_ < *due)) {
    out.nods.push_back(BehaviorEvent::make(now_ms, BehaviorKind::kNod));
    next_nod_ += nod_period_ms_;
  }
  if (due && *due <= now_ms) {
    out.end_of_turn = now_ms;
    open_ = false;
    speaking_ = false;
  }
  return out;
}

BehaviorController::BehaviorController(const BehaviorConfig& config,
                                       std::uint64_t seed, std::int64_t start_ms)
    : config_(config),
      gaze_(config, Rng::derive(seed, "gaze"), start_ms),
      gesture_rng_(Rng::derive(seed, "gesture")),
      nod_(config) {}

std::vector<BehaviorEvent> BehaviorController::begin_system_turn(
    std::int64_t at_ms, ExpressionClass expression) {
  if (turn_.holder != TurnHolder::kSystem) {
    throw std::logic_error("system turn started while the user holds the floor");
  }
  system_speaking_ = true;
  return {BehaviorEvent::make_expression(at_ms, expression),
          BehaviorEvent::make_gesture(at_ms, select_gesture(gesture_rng_, config_))};
}

std::vector<BehaviorEvent> BehaviorController::end_system_turn(std::int64_t at_ms) {
  system_speaking_ = false;
  return {BehaviorEvent::make(at_ms, BehaviorKind::kGestureEnd),
          BehaviorEvent::make_expression(at_ms, ExpressionClass::kNeutral)};
}

std::vector<BehaviorEvent> BehaviorController::open_user_turn(std::int64_t at_ms) {
  if (system_speaking_) {
    throw std::logic_error("user turn opened while the system is speaking");
  }
  turn_.holder = TurnHolder::kUser;
  turn_.last_user_activity.reset();
  nod_.open_turn(at_ms);
  return {BehaviorEvent::make(at_ms, BehaviorKind::kListeningOn)};
}

void BehaviorController::on_activity(SpeechActivity activity, std::int64_t at_ms) {
  if (turn_.holder != TurnHolder::kUser) return;
  nod_.on_activity(activity, at_ms);
  turn_.last_user_activity = at_ms;
}

BehaviorController::TickOutput BehaviorController::tick(std::int64_t now_ms) {
  TickOutput out;
  if (stopped_) return out;
  out.events = gaze_.advance_to(now_ms);
  if (turn_.holder == TurnHolder::kUser) {
    auto nods = nod_.advance_to(now_ms);
    out.events.insert(out.events.end(), nods.nods.begin(), nods.nods.end());
    if (nods.end_of_turn) {
      out.end_of_turn = nods.end_of_turn;
      out.events.push_back(BehaviorEvent::make(now_ms, BehaviorKind::kListeningOff));
      turn_.holder = TurnHolder::kSystem;
      turn_.last_user_activity.reset();
    }
  }
  return out;
}

}  // namespace nora
