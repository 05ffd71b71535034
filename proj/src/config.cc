#include "nora/config.h"

#include <charconv>
#include <functional>
#include <map>
#include <sstream>

#include "nora/text.h"

namespace nora {

namespace {

template <typename T>
T parse_number(std::string_view key, std::string_view value) {
  T out{};
  auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw InvalidConfig("config key '" + std::string(key) + "': bad value '" +
                        std::string(value) + "'");
  }
  return out;
}

using Setter = std::function<void(RuntimeConfig&, std::string_view, std::string_view)>;

template <typename T>
Setter number(T RuntimeConfig::*field) {
  return [field](RuntimeConfig& c, std::string_view k, std::string_view v) {
    c.*field = parse_number<T>(k, v);
  };
}

template <typename T>
Setter behavior(T BehaviorConfig::*field) {
  return [field](RuntimeConfig& c, std::string_view k, std::string_view v) {
    c.behavior.*field = parse_number<T>(k, v);
  };
}

template <typename T>
Setter care(T CareThresholds::*field) {
  return [field](RuntimeConfig& c, std::string_view k, std::string_view v) {
    c.care.*field = parse_number<T>(k, v);
  };
}

Setter path(std::string RuntimeConfig::*field) {
  return [field](RuntimeConfig& c, std::string_view, std::string_view v) {
    c.*field = std::string(v);
  };
}

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"tick_ms", number(&RuntimeConfig::tick_ms)},
      {"ms_per_word", number(&RuntimeConfig::ms_per_word)},
      {"min_utterance_ms", number(&RuntimeConfig::min_utterance_ms)},
      {"seed", number(&RuntimeConfig::seed)},
      {"silence_end_of_turn_s", behavior(&BehaviorConfig::silence_end_of_turn_s)},
      {"gaze_interval_s", behavior(&BehaviorConfig::gaze_interval_s)},
      {"gaze_outer_radius_m", behavior(&BehaviorConfig::gaze_outer_radius_m)},
      {"gaze_inner_radius_m", behavior(&BehaviorConfig::gaze_inner_radius_m)},
      {"gaze_width_m", behavior(&BehaviorConfig::gaze_width_m)},
      {"gesture_count", behavior(&BehaviorConfig::gesture_count)},
      {"nod_period_s", behavior(&BehaviorConfig::nod_period_s)},
      {"extreme_stress", care(&CareThresholds::extreme_stress)},
      {"extreme_sentiment", care(&CareThresholds::extreme_sentiment)},
      {"elevated_mean", care(&CareThresholds::elevated_mean)},
      {"rolling_window", care(&CareThresholds::window)},
      {"templates", path(&RuntimeConfig::templates_path)},
      {"nlu_rules", path(&RuntimeConfig::nlu_rules_path)},
      {"lexicon_dir", path(&RuntimeConfig::lexicon_dir)},
  };
  return table;
}

}  // namespace

void RuntimeConfig::validate() const {
  behavior.validate();
  care.validate();
  if (tick_ms <= 0) throw InvalidConfig("tick_ms must be positive");
  if (ms_per_word < 0 || min_utterance_ms <= 0) {
    throw InvalidConfig("utterance timing must be positive");
  }
}

void apply_config_entry(RuntimeConfig& config, std::string_view key,
                        std::string_view value) {
  auto it = setters().find(key);
  if (it == setters().end()) {
    throw InvalidConfig("unknown config key '" + std::string(key) + "'");
  }
  it->second(config, key, value);
}

RuntimeConfig parse_config(std::string_view content, RuntimeConfig base) {
  std::istringstream in{std::string(content)};
  std::string line;
  for (std::size_t lineno = 1; std::getline(in, line); ++lineno) {
    const std::string stripped = text::trim(line);
    if (stripped.empty() || stripped.front() == '#') continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw InvalidConfig("config line " + std::to_string(lineno) +
                          ": expected key=value");
    }
    apply_config_entry(base, text::trim(stripped.substr(0, eq)),
                       text::trim(stripped.substr(eq + 1)));
  }
  base.validate();
  return base;
}

RuntimeConfig load_config(const std::string& path, RuntimeConfig base) {
  return parse_config(text::read_file(path), std::move(base));
}

std::shared_ptr<const Resources> Resources::builtin() {
  static const auto res = std::make_shared<const Resources>(
      Resources{TemplateBank::builtin(), RuleSet::builtin(), Lexicons::builtin()});
  return res;
}

std::shared_ptr<const Resources> Resources::load(const RuntimeConfig& config) {
  if (config.templates_path.empty() && config.nlu_rules_path.empty() &&
      config.lexicon_dir.empty()) {
    return builtin();
  }
  return std::make_shared<const Resources>(Resources{
      config.templates_path.empty() ? TemplateBank::builtin()
                                    : TemplateBank::load(config.templates_path),
      config.nlu_rules_path.empty() ? RuleSet::builtin()
                                    : RuleSet::load(config.nlu_rules_path),
      config.lexicon_dir.empty() ? Lexicons::builtin()
                                 : Lexicons::load_dir(config.lexicon_dir)});
}

}  // namespace nora
