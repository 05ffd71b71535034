#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "nora/dialogue.h"
#include "nora/empathy.h"

namespace nora {

struct UserProfile {
  std::optional<std::string> profession;
  Date created_date;

  bool operator==(const UserProfile&) const = default;
};

using SessionKey = std::pair<std::string, Date>;  // (user_id, date)

/// Everything the service remembers between runs.
struct PersistedStore {
  std::map<std::string, UserProfile> users;
  std::map<SessionKey, SessionRecord> sessions;
  std::map<std::string, MoodTimeline> timelines;

  /// The user's records strictly before `date`, oldest first.
  std::vector<SessionRecord> history(const std::string& user_id, const Date& before) const;
  const SessionRecord* find(const std::string& user_id, const Date& date) const;

  bool operator==(const PersistedStore&) const = default;
};

/// A line that could not be loaded. Loading skips it and carries on.
struct CorruptRecord {
  std::string file;
  std::size_t line = 0;
  std::string reason;
};

struct LoadResult {
  PersistedStore store;
  std::vector<CorruptRecord> corrupt;
};

// On-disk layout: users.jsonl, sessions.jsonl and timelines.jsonl, one JSON
// object per line. sessions.jsonl is a snapshot journal; the last line for a
// (user_id, date) wins, so a crash mid-write loses only the in-flight turn.
inline constexpr const char* kUsersFile = "users.jsonl";
inline constexpr const char* kSessionsFile = "sessions.jsonl";
inline constexpr const char* kTimelinesFile = "timelines.jsonl";

nlohmann::json answers_to_json(const Answers& answers);
Answers answers_from_json(const nlohmann::json& j);
nlohmann::json session_to_json(const SessionRecord& record);
SessionRecord session_from_json(const nlohmann::json& j);
nlohmann::json user_to_json(const std::string& user_id, const UserProfile& profile);
nlohmann::json timeline_entry_to_json(const std::string& user_id, const TimelineEntry& e);

/// Missing files load as empty. Never throws on bad content.
LoadResult load_store(const std::filesystem::path& dir);

/// Writes the compacted store: one line per user, session and timeline entry.
void save_store(const PersistedStore& store, const std::filesystem::path& dir);

/// In-memory store plus an optional append-only journal directory. Every
/// append is flushed before returning.
class Store {
 public:
  /// Purely in memory.
  Store() = default;
  /// Loads `dir` (created if missing) and journals into it.
  explicit Store(std::filesystem::path dir);

  const PersistedStore& data() const { return data_; }
  const std::vector<CorruptRecord>& load_errors() const { return load_errors_; }
  bool persistent() const { return dir_.has_value(); }

  void put_user(const std::string& user_id, const UserProfile& profile);
  void put_session(const SessionRecord& record);
  /// Appends an entry via update_timeline (OutOfOrderDate propagates).
  void add_to_timeline(const SessionRecord& record);

  /// Rewrites the journal files in compacted form.
  void compact();

 private:
  void append(const char* file, const nlohmann::json& j);

  PersistedStore data_;
  std::vector<CorruptRecord> load_errors_;
  std::optional<std::filesystem::path> dir_;
};

}  // namespace nora
