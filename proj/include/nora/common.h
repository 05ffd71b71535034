#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace nora {

// Base class for every error the library raises on purpose.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DuplicateSession : public Error {
 public:
  using Error::Error;
};

class MissingSlot : public Error {
 public:
  using Error::Error;
};

class OutOfOrderDate : public Error {
 public:
  using Error::Error;
};

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class ProtocolError : public Error {
 public:
  using Error::Error;
};

class UnknownSession : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

/// The six facial expression classes shared by empathy analysis, the
/// expression predictor and every renderer.
enum class ExpressionClass {
  kHappiness,
  kSadness,
  kAnger,
  kSurprise,
  kLaughter,
  kNeutral,
};

inline constexpr std::array<ExpressionClass, 6> kAllExpressions = {
    ExpressionClass::kHappiness, ExpressionClass::kSadness,
    ExpressionClass::kAnger,     ExpressionClass::kSurprise,
    ExpressionClass::kLaughter,  ExpressionClass::kNeutral,
};

std::string_view to_string(ExpressionClass e);
std::optional<ExpressionClass> parse_expression(std::string_view name);

/// Position in the check-in flow. The phase names the question the system is
/// currently waiting on.
enum class Phase {
  kIntro,
  kAskProfession,
  kAskMood,
  kAskTemperature,
  kAskBreath,
  kAskGratitude,
  kRecommendActivity,
  kActivityFollowUp,
  kGoodbye,
  kEnded,
};

inline constexpr std::array<Phase, 10> kAllPhases = {
    Phase::kIntro,          Phase::kAskProfession,     Phase::kAskMood,
    Phase::kAskTemperature, Phase::kAskBreath,         Phase::kAskGratitude,
    Phase::kRecommendActivity, Phase::kActivityFollowUp, Phase::kGoodbye,
    Phase::kEnded,
};

std::string_view to_string(Phase p);
std::optional<Phase> parse_phase(std::string_view name);

enum class Activity { kYoga, kExercise, kMeditation };

inline constexpr std::array<Activity, 3> kAllActivities = {
    Activity::kYoga, Activity::kExercise, Activity::kMeditation};

std::string_view to_string(Activity a);
std::optional<Activity> parse_activity(std::string_view name);

/// Proleptic Gregorian calendar date, ISO-8601 text form.
struct Date {
  int year = 1970;
  int month = 1;
  int day = 1;

  auto operator<=>(const Date&) const = default;

  /// Parses "YYYY-MM-DD"; throws std::invalid_argument on bad input.
  static Date parse(std::string_view iso);
  static Date today();
  std::string iso() const;
  Date next() const;
};

}  // namespace nora
