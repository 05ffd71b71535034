#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "nora/behavior.h"
#include "nora/common.h"

namespace nora {

/// Protocol envelope: {"type": ..., "session_id": ..., "payload": {...}}.
///
/// client -> server: hello{user_id, date?, render_nonverbal?},
///   user_utterance{text, ts_ms}, speech_event{kind: start|stop}, bye{}
/// server -> client: session_started{kind, resumed},
///   system_utterance{text, expression, gesture_id, phase, asks},
///   behavior{at, kind, ...}, listening{on}, session_ended{summary},
///   error{code, message}
struct WireMessage {
  std::string type;
  std::string session_id;
  nlohmann::json payload = nlohmann::json::object();

  nlohmann::json to_json() const;
  /// Throws ProtocolError on a malformed envelope.
  static WireMessage from_json(const nlohmann::json& j);

  /// Compact, key-sorted JSON text.
  std::string serialize() const;
  static WireMessage parse(std::string_view text);

  bool operator==(const WireMessage&) const = default;
};

namespace msg {

inline constexpr std::string_view kHello = "hello";
inline constexpr std::string_view kUserUtterance = "user_utterance";
inline constexpr std::string_view kSpeechEvent = "speech_event";
inline constexpr std::string_view kBye = "bye";

inline constexpr std::string_view kSessionStarted = "session_started";
inline constexpr std::string_view kSystemUtterance = "system_utterance";
inline constexpr std::string_view kBehavior = "behavior";
inline constexpr std::string_view kListening = "listening";
inline constexpr std::string_view kSessionEnded = "session_ended";
inline constexpr std::string_view kError = "error";

WireMessage hello(const std::string& user_id, std::optional<Date> date = std::nullopt,
                  bool render_nonverbal = true);
WireMessage user_utterance(const std::string& session_id, const std::string& text,
                           std::int64_t ts_ms);
WireMessage speech_event(const std::string& session_id, bool start);
WireMessage bye(const std::string& session_id);

WireMessage session_started(const std::string& session_id, std::string_view kind,
                            bool resumed);
WireMessage system_utterance(const std::string& session_id, const std::string& text,
                             ExpressionClass expression, std::optional<int> gesture_id,
                             Phase phase, Phase asks);
WireMessage behavior(const std::string& session_id, const BehaviorEvent& event);
WireMessage listening(const std::string& session_id, bool on);
WireMessage session_ended(const std::string& session_id, nlohmann::json summary);
WireMessage error(const std::string& session_id, std::string_view code,
                  const std::string& message);

/// Inverse of behavior(); throws ProtocolError for a non-behavior message.
BehaviorEvent behavior_event(const WireMessage& m);

}  // namespace msg

/// One line of a session trace: at_ms<TAB>type<TAB>message-json.
struct TraceLine {
  std::int64_t at_ms = 0;
  WireMessage message;

  bool operator==(const TraceLine&) const = default;
};

std::string format_trace_line(const TraceLine& line);
/// Throws ProtocolError naming the line on malformed input.
TraceLine parse_trace_line(std::string_view line);

void write_trace(std::ostream& out, const std::vector<TraceLine>& lines);
/// Skips blank lines and '#' comments.
std::vector<TraceLine> read_trace(std::istream& in);

}  // namespace nora
