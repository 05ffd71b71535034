#include "nora/store.h"

#include <fstream>
#include <system_error>

namespace nora {

using nlohmann::json;

namespace {

json empathy_to_json(const EmpathyScores& e) {
  return json{{"sentiment", e.sentiment},
              {"stress", e.stress},
              {"emotion", to_string(e.emotion)}};
}

ExpressionClass expression_from(const json& j) {
  auto e = parse_expression(j.get<std::string>());
  if (!e) throw std::invalid_argument("unknown expression '" + j.get<std::string>() + "'");
  return *e;
}

EmpathyScores empathy_from_json(const json& j) {
  return EmpathyScores{j.at("sentiment").get<double>(), j.at("stress").get<double>(),
                       expression_from(j.at("emotion"))};
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<T>();
}

std::vector<json> read_lines(const std::filesystem::path& path,
                             std::vector<CorruptRecord>& corrupt,
                             std::vector<std::size_t>& line_numbers) {
  std::vector<json> out;
  std::ifstream in(path);
  if (!in) return out;
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    if (line.empty()) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      corrupt.push_back({path.filename().string(), lineno, "not a JSON object"});
      continue;
    }
    out.push_back(std::move(j));
    line_numbers.push_back(lineno);
  }
  return out;
}

void write_lines(const std::filesystem::path& path, const std::vector<json>& lines) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    for (const auto& j : lines) out << j.dump() << '\n';
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace

json answers_to_json(const Answers& a) {
  json j = json::object();
  put_optional(j, "profession", a.profession);
  put_optional(j, "mood", a.mood);
  put_optional(j, "temperature_c", a.temperature_c);
  put_optional(j, "short_of_breath", a.short_of_breath);
  put_optional(j, "gratitude", a.gratitude);
  if (a.activity) j["activity"] = to_string(*a.activity);
  put_optional(j, "activity_feedback", a.activity_feedback);
  return j;
}

Answers answers_from_json(const json& j) {
  Answers a;
  a.profession = get_optional<std::string>(j, "profession");
  a.mood = get_optional<std::string>(j, "mood");
  a.temperature_c = get_optional<double>(j, "temperature_c");
  a.short_of_breath = get_optional<bool>(j, "short_of_breath");
  a.gratitude = get_optional<std::string>(j, "gratitude");
  if (auto act = get_optional<std::string>(j, "activity")) {
    a.activity = parse_activity(*act);
    if (!a.activity) throw std::invalid_argument("unknown activity '" + *act + "'");
  }
  a.activity_feedback = get_optional<std::string>(j, "activity_feedback");
  return a;
}

std::vector<SessionRecord> PersistedStore::history(const std::string& user_id,
                                                   const Date& before) const {
  std::vector<SessionRecord> out;
  for (auto it = sessions.lower_bound({user_id, Date{INT32_MIN, 1, 1}});
       it != sessions.end() && it->first.first == user_id; ++it) {
    if (it->first.second < before) out.push_back(it->second);
  }
  return out;
}

const SessionRecord* PersistedStore::find(const std::string& user_id,
                                          const Date& date) const {
  auto it = sessions.find({user_id, date});
  return it == sessions.end() ? nullptr : &it->second;
}

json session_to_json(const SessionRecord& r) {
  json turns = json::array();
  for (const auto& t : r.turns) {
    json jt{{"speaker", t.speaker == Speaker::kUser ? "user" : "system"},
            {"text", t.text},
            {"ts_ms", t.timestamp_ms}};
    if (t.empathy) jt["empathy"] = empathy_to_json(*t.empathy);
    if (t.expression) jt["expression"] = to_string(*t.expression);
    turns.push_back(std::move(jt));
  }
  return json{{"user_id", r.user_id},
              {"date", r.date.iso()},
              {"kind", to_string(r.kind)},
              {"completed", r.completed},
              {"answers", answers_to_json(r.answers)},
              {"turns", std::move(turns)}};
}

SessionRecord session_from_json(const json& j) {
  SessionRecord r;
  r.user_id = j.at("user_id").get<std::string>();
  if (r.user_id.empty()) throw std::invalid_argument("empty user_id");
  r.date = Date::parse(j.at("date").get<std::string>());
  auto kind = parse_session_kind(j.at("kind").get<std::string>());
  if (!kind) throw std::invalid_argument("unknown session kind");
  r.kind = *kind;
  r.completed = j.at("completed").get<bool>();
  r.answers = answers_from_json(j.at("answers"));
  std::int64_t last_ts = -1;
  for (const auto& jt : j.at("turns")) {
    TurnRecord t;
    const auto speaker = jt.at("speaker").get<std::string>();
    if (speaker != "user" && speaker != "system") {
      throw std::invalid_argument("unknown speaker '" + speaker + "'");
    }
    t.speaker = speaker == "user" ? Speaker::kUser : Speaker::kSystem;
    t.text = jt.at("text").get<std::string>();
    t.timestamp_ms = jt.at("ts_ms").get<std::int64_t>();
    if (t.timestamp_ms <= last_ts) {
      throw std::invalid_argument("turn timestamps must strictly increase");
    }
    last_ts = t.timestamp_ms;
    if (auto e = jt.find("empathy"); e != jt.end()) t.empathy = empathy_from_json(*e);
    if (auto x = jt.find("expression"); x != jt.end()) t.expression = expression_from(*x);
    r.turns.push_back(std::move(t));
  }
  return r;
}

json user_to_json(const std::string& user_id, const UserProfile& p) {
  json j{{"user_id", user_id}, {"created_date", p.created_date.iso()}};
  put_optional(j, "profession", p.profession);
  return j;
}

json timeline_entry_to_json(const std::string& user_id, const TimelineEntry& e) {
  return json{{"user_id", user_id},
              {"date", e.date.iso()},
              {"mean_sentiment", e.mean_sentiment},
              {"mean_stress", e.mean_stress},
              {"dominant_emotion", to_string(e.dominant_emotion)}};
}

LoadResult load_store(const std::filesystem::path& dir) {
  LoadResult result;
  auto& store = result.store;

  auto load = [&](const char* file, auto&& apply) {
    std::vector<std::size_t> numbers;
    auto lines = read_lines(dir / file, result.corrupt, numbers);
    for (std::size_t i = 0; i < lines.size(); ++i) {
      try {
        apply(lines[i]);
      } catch (const std::exception& e) {
        result.corrupt.push_back({file, numbers[i], e.what()});
      }
    }
  };

  load(kUsersFile, [&](const json& j) {
    UserProfile p;
    p.created_date = Date::parse(j.at("created_date").get<std::string>());
    p.profession = get_optional<std::string>(j, "profession");
    const auto id = j.at("user_id").get<std::string>();
    if (id.empty()) throw std::invalid_argument("empty user_id");
    store.users[id] = p;
  });

  load(kSessionsFile, [&](const json& j) {
    SessionRecord r = session_from_json(j);
    SessionKey key{r.user_id, r.date};
    store.sessions[key] = std::move(r);
  });

  load(kTimelinesFile, [&](const json& j) {
    const auto id = j.at("user_id").get<std::string>();
    if (id.empty()) throw std::invalid_argument("empty user_id");
    TimelineEntry e{Date::parse(j.at("date").get<std::string>()),
                    j.at("mean_sentiment").get<double>(),
                    j.at("mean_stress").get<double>(),
                    expression_from(j.at("dominant_emotion"))};
    auto& tl = store.timelines[id];
    if (!tl.entries.empty() && e.date <= tl.entries.back().date) {
      throw OutOfOrderDate("timeline date " + e.date.iso() + " is not increasing");
    }
    tl.user_id = id;
    tl.entries.push_back(e);
  });
  return result;
}

void save_store(const PersistedStore& store, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  std::vector<json> users, sessions, timelines;
  for (const auto& [id, p] : store.users) users.push_back(user_to_json(id, p));
  for (const auto& [key, r] : store.sessions) sessions.push_back(session_to_json(r));
  for (const auto& [id, tl] : store.timelines) {
    for (const auto& e : tl.entries) timelines.push_back(timeline_entry_to_json(id, e));
  }
  write_lines(dir / kUsersFile, users);
  write_lines(dir / kSessionsFile, sessions);
  write_lines(dir / kTimelinesFile, timelines);
}

Store::Store(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(*dir_);
  auto loaded = load_store(*dir_);
  data_ = std::move(loaded.store);
  load_errors_ = std::move(loaded.corrupt);
  // A torn final line must not swallow the next append.
  for (const char* file : {kUsersFile, kSessionsFile, kTimelinesFile}) {
    const auto path = *dir_ / file;
    std::ifstream in(path, std::ios::binary | std::ios::ate);
    if (!in || in.tellg() <= 0) continue;
    in.seekg(-1, std::ios::end);
    if (in.get() != '\n') std::ofstream(path, std::ios::app) << '\n';
  }
}

void Store::append(const char* file, const json& j) {
  if (!dir_) return;
  std::ofstream out(*dir_ / file, std::ios::app);
  if (!out) throw std::runtime_error(std::string("cannot append to ") + file);
  out << j.dump() << '\n';
  out.flush();
}

void Store::put_user(const std::string& user_id, const UserProfile& profile) {
  auto it = data_.users.find(user_id);
  if (it != data_.users.end() && it->second == profile) return;
  data_.users[user_id] = profile;
  append(kUsersFile, user_to_json(user_id, profile));
}

void Store::put_session(const SessionRecord& record) {
  data_.sessions[{record.user_id, record.date}] = record;
  append(kSessionsFile, session_to_json(record));
}

void Store::add_to_timeline(const SessionRecord& record) {
  auto it = data_.timelines.find(record.user_id);
  MoodTimeline updated = update_timeline(
      it == data_.timelines.end() ? MoodTimeline{record.user_id, {}} : it->second, record);
  const TimelineEntry added = updated.entries.back();
  data_.timelines[record.user_id] = std::move(updated);
  append(kTimelinesFile, timeline_entry_to_json(record.user_id, added));
}

void Store::compact() {
  if (dir_) save_store(data_, *dir_);
}

}  // namespace nora
