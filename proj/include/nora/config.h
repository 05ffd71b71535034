#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <string_view>

#include "nora/behavior.h"
#include "nora/empathy.h"
#include "nora/nlu.h"
#include "nora/templates.h"

namespace nora {

/// Service settings. Loaded from a key=value file; see apply_config_entry for
/// the accepted keys.
struct RuntimeConfig {
  BehaviorConfig behavior;
  CareThresholds care;
  std::int64_t tick_ms = 50;
  /// Simulated speaking time of a system utterance.
  std::int64_t ms_per_word = 300;
  std::int64_t min_utterance_ms = 1000;
  std::uint64_t seed = 0;

  // Optional data overrides; empty means the built-in assets.
  std::string templates_path;
  std::string nlu_rules_path;
  std::string lexicon_dir;

  void validate() const;
};

/// Sets one key. Throws InvalidConfig for unknown keys or bad values.
void apply_config_entry(RuntimeConfig& config, std::string_view key,
                        std::string_view value);

/// Parses `key = value` lines; blank lines and '#' comments are skipped.
RuntimeConfig parse_config(std::string_view content, RuntimeConfig base = {});
RuntimeConfig load_config(const std::string& path, RuntimeConfig base = {});

/// Data the dialogue pipeline reads: templates, rules and lexicons.
struct Resources {
  TemplateBank templates;
  RuleSet rules;
  Lexicons lexicons;

  static std::shared_ptr<const Resources> builtin();
  static std::shared_ptr<const Resources> load(const RuntimeConfig& config);
};

}  // namespace nora
