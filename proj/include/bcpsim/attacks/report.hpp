#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "bcpsim/core/message_id.hpp"
#include "bcpsim/core/scope.hpp"
#include "bcpsim/error.hpp"
#include "bcpsim/victims/ledger.hpp"

namespace bcpsim {

enum class Verdict { succeeded, blocked };

std::string_view to_string(Verdict v);  // "Succeeded" / "Blocked"
std::optional<Verdict> parse_verdict(std::string_view text);

// One message whose content reached the attacker.
struct LeakedMessage {
  ChannelId channel;
  MessageId message;
  std::string content;
  bool truncated = false;
  bool matches_truth = false;
};

// Outcome of one attack scenario run.
//
// Invariant (checked by validate()): Succeeded carries evidence (ledger
// effects, leaked content, download references, or artifacts); Blocked
// carries at least one justification (a denial reason or an observed
// absence).
struct AttackReport {
  std::string scenario;
  std::string variant;
  std::string profile;
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::blocked;

  std::vector<std::string> justifications;
  std::set<DenialReason> denials;

  std::vector<Effect> effects;
  std::vector<LeakedMessage> leaked;
  std::size_t expected_leaks = 0;
  std::vector<std::string> download_refs;
  std::vector<std::string> artifacts;  // attacker-controlled output seen by victims
  std::optional<bool> stealthy;

  std::string grant_kind;
  ScopeSet grant_scopes;
  std::size_t api_calls = 0;
  SimTime sim_duration = 0;
  std::size_t max_unfurls_per_second = 0;
  std::vector<std::string> notes;

  bool has_evidence() const;
  Status validate() const;
};

nlohmann::json to_json(const AttackReport& r);
std::string summary(const AttackReport& r);

}  // namespace bcpsim
