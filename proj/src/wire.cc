#include "nora/wire.h"

#include <istream>
#include <ostream>

namespace nora {

using nlohmann::json;

json WireMessage::to_json() const {
  return json{{"type", type}, {"session_id", session_id}, {"payload", payload}};
}

WireMessage WireMessage::from_json(const json& j) {
  if (!j.is_object()) throw ProtocolError("message must be a JSON object");
  auto type = j.find("type");
  if (type == j.end() || !type->is_string() || type->get<std::string>().empty()) {
    throw ProtocolError("message needs a non-empty string 'type'");
  }
  WireMessage m;
  m.type = type->get<std::string>();
  if (auto sid = j.find("session_id"); sid != j.end() && !sid->is_null()) {
    if (!sid->is_string()) throw ProtocolError("'session_id' must be a string");
    m.session_id = sid->get<std::string>();
  }
  if (auto payload = j.find("payload"); payload != j.end() && !payload->is_null()) {
    if (!payload->is_object()) throw ProtocolError("'payload' must be an object");
    m.payload = *payload;
  }
  return m;
}

std::string WireMessage::serialize() const { return to_json().dump(); }

WireMessage WireMessage::parse(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ProtocolError("message is not valid JSON");
  return from_json(j);
}

namespace msg {

namespace {

WireMessage make(std::string_view type, const std::string& sid, json payload) {
  return WireMessage{std::string(type), sid, std::move(payload)};
}

}  // namespace

WireMessage hello(const std::string& user_id, std::optional<Date> date,
                  bool render_nonverbal) {
  json p{{"user_id", user_id}, {"render_nonverbal", render_nonverbal}};
  if (date) p["date"] = date->iso();
  return make(kHello, "", std::move(p));
}

WireMessage user_utterance(const std::string& sid, const std::string& text,
                           std::int64_t ts_ms) {
  return make(kUserUtterance, sid, {{"text", text}, {"ts_ms", ts_ms}});
}

WireMessage speech_event(const std::string& sid, bool start) {
  return make(kSpeechEvent, sid, {{"kind", start ? "start" : "stop"}});
}

WireMessage bye(const std::string& sid) { return make(kBye, sid, json::object()); }

WireMessage session_started(const std::string& sid, std::string_view kind,
                            bool resumed) {
  return make(kSessionStarted, sid, {{"kind", kind}, {"resumed", resumed}});
}

WireMessage system_utterance(const std::string& sid, const std::string& text,
                             ExpressionClass expression, std::optional<int> gesture_id,
                             Phase phase, Phase asks) {
  json p{{"text", text},
         {"expression", to_string(expression)},
         {"phase", to_string(phase)},
         {"asks", to_string(asks)}};
  p["gesture_id"] = gesture_id ? json(*gesture_id) : json(nullptr);
  return make(kSystemUtterance, sid, std::move(p));
}

WireMessage behavior(const std::string& sid, const BehaviorEvent& e) {
  json p = json::parse(e.payload_json());
  p["at"] = e.at_ms;
  p["kind"] = to_string(e.kind);
  return make(kBehavior, sid, std::move(p));
}

WireMessage listening(const std::string& sid, bool on) {
  return make(kListening, sid, {{"on", on}});
}

WireMessage session_ended(const std::string& sid, json summary) {
  return make(kSessionEnded, sid, {{"summary", std::move(summary)}});
}

WireMessage error(const std::string& sid, std::string_view code,
                  const std::string& message) {
  return make(kError, sid, {{"code", code}, {"message", message}});
}

BehaviorEvent behavior_event(const WireMessage& m) {
  if (m.type != kBehavior) throw ProtocolError("not a behavior message");
  try {
    auto kind = parse_behavior_kind(m.payload.at("kind").get<std::string>());
    if (!kind) throw ProtocolError("unknown behavior kind");
    json rest = m.payload;
    rest.erase("kind");
    rest.erase("at");
    return BehaviorEvent::from_payload(m.payload.at("at").get<std::int64_t>(), *kind,
                                       rest.dump());
  } catch (const json::exception& e) {
    throw ProtocolError(std::string("bad behavior payload: ") + e.what());
  }
}

}  // namespace msg

std::string format_trace_line(const TraceLine& line) {
  return std::to_string(line.at_ms) + '\t' + line.message.type + '\t' +
         line.message.serialize();
}

TraceLine parse_trace_line(std::string_view line) {
  const auto t1 = line.find('\t');
  const auto t2 = t1 == std::string_view::npos ? t1 : line.find('\t', t1 + 1);
  if (t2 == std::string_view::npos) {
    throw ProtocolError("trace line needs at_ms<TAB>type<TAB>json");
  }
  TraceLine out;
  try {
    std::size_t used = 0;
    const std::string at(line.substr(0, t1));
    out.at_ms = std::stoll(at, &used);
    if (used != at.size()) throw std::invalid_argument("at_ms");
  } catch (const std::exception&) {
    throw ProtocolError("trace line has a bad at_ms field");
  }
  out.message = WireMessage::parse(line.substr(t2 + 1));
  if (out.message.type != line.substr(t1 + 1, t2 - t1 - 1)) {
    throw ProtocolError("trace line type column does not match the message");
  }
  return out;
}

void write_trace(std::ostream& out, const std::vector<TraceLine>& lines) {
  for (const auto& l : lines) out << format_trace_line(l) << '\n';
}

std::vector<TraceLine> read_trace(std::istream& in) {
  std::vector<TraceLine> lines;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    try {
      lines.push_back(parse_trace_line(line));
    } catch (const ProtocolError& e) {
      throw ProtocolError("trace line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return lines;
}

}  // namespace nora
