#include "nora/common.h"

#include <charconv>
#include <chrono>
#include <cstdio>
#include <ctime>

namespace nora {

namespace {

constexpr std::array<std::string_view, 6> kExpressionNames = {
    "happiness", "sadness", "anger", "surprise", "laughter", "neutral"};

constexpr std::array<std::string_view, 10> kPhaseNames = {
    "intro",      "ask_profession",     "ask_mood",
    "ask_temperature", "ask_breath",    "ask_gratitude",
    "recommend_activity", "activity_follow_up", "goodbye",
    "ended"};

constexpr std::array<std::string_view, 3> kActivityNames = {"yoga", "exercise",
                                                            "meditation"};

bool is_leap(int y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

int days_in_month(int y, int m) {
  static constexpr int kDays[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
  return m == 2 && is_leap(y) ? 29 : kDays[m - 1];
}

int parse_field(std::string_view s) {
  int v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad date field '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

std::string_view to_string(ExpressionClass e) {
  return kExpressionNames[static_cast<std::size_t>(e)];
}

std::optional<ExpressionClass> parse_expression(std::string_view name) {
  for (std::size_t i = 0; i < kExpressionNames.size(); ++i) {
    if (kExpressionNames[i] == name) return static_cast<ExpressionClass>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Phase p) {
  return kPhaseNames[static_cast<std::size_t>(p)];
}

std::optional<Phase> parse_phase(std::string_view name) {
  for (std::size_t i = 0; i < kPhaseNames.size(); ++i) {
    if (kPhaseNames[i] == name) return static_cast<Phase>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Activity a) {
  return kActivityNames[static_cast<std::size_t>(a)];
}

std::optional<Activity> parse_activity(std::string_view name) {
  for (std::size_t i = 0; i < kActivityNames.size(); ++i) {
    if (kActivityNames[i] == name) return static_cast<Activity>(i);
  }
  return std::nullopt;
}

Date Date::parse(std::string_view iso) {
  if (iso.size() != 10 || iso[4] != '-' || iso[7] != '-') {
    throw std::invalid_argument("expected YYYY-MM-DD, got '" +
                                std::string(iso) + "'");
  }
  Date d{parse_field(iso.substr(0, 4)), parse_field(iso.substr(5, 2)),
         parse_field(iso.substr(8, 2))};
  if (d.month < 1 || d.month > 12 || d.day < 1 ||
      d.day > days_in_month(d.year, d.month)) {
    throw std::invalid_argument("date out of range '" + std::string(iso) + "'");
  }
  return d;
}

Date Date::today() {
  std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm local{};
  localtime_r(&now, &local);
  return Date{local.tm_year + 1900, local.tm_mon + 1, local.tm_mday};
}

std::string Date::iso() const {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02d", year, month, day);
  return buf;
}

Date Date::next() const {
  Date d = *this;
  if (++d.day > days_in_month(d.year, d.month)) {
    d.day = 1;
    if (++d.month > 12) {
      d.month = 1;
      ++d.year;
    }
  }
  return d;
}

}  // namespace nora
