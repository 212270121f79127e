#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "bcpsim/attacks/scenario.hpp"

namespace bcpsim {

// Declarative check on a finished scenario run.
//   verdict=Succeeded            {"verdict": "Succeeded"}
//   ledger-contains=EmailSent    {"ledger_contains": {"kind": "EmailSent", "author": "alice"}}
//   leaked-set-equals=window     {"leaked_set_equals": "window"} or a list of texts
//   leaked=30                    {"leaked": 30}
struct Assertion {
  enum class Kind { verdict, ledger_contains, leaked_set_equals, leaked_count };
  Kind kind = Kind::verdict;
  Verdict verdict = Verdict::succeeded;
  EffectKind effect = EffectKind::email_sent;
  std::map<std::string, std::string> fields;  // effect payload fields to match
  bool window = false;                        // leaked set vs the channel's true set
  std::vector<std::string> texts;
  std::size_t count = 0;

  std::string describe() const;
};

Result<Assertion> parse_assertion(std::string_view text);
Result<Assertion> assertion_from_json(const nlohmann::json& j);

struct AssertionResult {
  Assertion assertion;
  bool pass = false;
  std::string detail;
};

AssertionResult check_assertion(const Assertion& a, const ScenarioRun& run);

// One timed step of a scripted scenario. `at` is seconds after the
// workspace start time; `actor` names a user (client actions) or an app
// (API actions, with args.as naming the delegating user).
struct ScenarioStep {
  SimTime at = 0;
  std::string actor;
  std::string action;
  nlohmann::json args = nlohmann::json::object();
};

// A scenario file: either a built-in with option overrides, or a step
// script. Schema:
//   {"name": str, "builtin": str, "variant": str,
//    "options": {"victim": str, "target_channel": str, "attacker_user": str,
//                "anchor_fallback": bool, "grant": [scope]},
//    "platforms": ["slack"|"teams"],
//    "steps": [{"at": int, "actor": str, "action": str, "args": {...}}],
//    "expect": {"kind": "EmailSent", ...},
//    "assert": [assertion]}
// A step script's verdict is Succeeded iff an "expect" effect is in the
// ledger and was either performed by a scripted app or caused by its content.
struct ScenarioSpec {
  std::string name;
  std::string source;
  std::string builtin;
  std::string variant;
  std::optional<std::string> victim;
  std::optional<std::string> target_channel;
  std::optional<std::string> attacker_user;
  std::optional<bool> anchor_fallback;
  std::optional<ScopeSet> grant;
  std::set<PlatformKind> platforms;
  std::vector<ScenarioStep> steps;
  std::optional<Assertion> expect;
  std::vector<Assertion> assertions;
};

Result<ScenarioSpec> spec_from_json(const nlohmann::json& j, const std::string& source);
// A file holds one scenario object or an array of them.
Result<std::vector<ScenarioSpec>> load_scenario_file(const std::filesystem::path& path);

// Step actions: install, authorize, uninstall, post, delete_last, schedule,
// save, unsave, upload, invoke, rename_command, register_domain, wait.
Result<ScenarioRun> run_spec(const ScenarioSpec& spec, const ScenarioOptions& base);

}  // namespace bcpsim
