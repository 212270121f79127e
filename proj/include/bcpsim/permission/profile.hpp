#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>

#include "bcpsim/core/manifest.hpp"
#include "bcpsim/core/scope.hpp"
#include "bcpsim/error.hpp"

namespace bcpsim {

enum class Countermeasure {
  finer_scopes,        // C1: split delegate posting into human/app targets
  unfurl_provenance,   // C2: unfurled content readable only if the origin is
  self_op_read,        // C3: saved-item listings hide content of own operations
  issuer_identity,     // C4: events carry the true issuer
  collision_guard,     // C5: command/domain namespace collisions
  full_revocation,     // C6: uninstall revokes everything, including schedules
};

enum class CollisionMode { reject, prompt, alias };

std::string_view code(Countermeasure cm);  // "C1".."C6"
std::string_view to_string(CollisionMode mode);

// Platform flavor plus enabled countermeasures. Fixed for a run.
struct PolicyProfile {
  PlatformKind platform = PlatformKind::slack;
  std::set<Countermeasure> countermeasures;
  CollisionMode collision_mode = CollisionMode::reject;

  bool has(Countermeasure cm) const { return countermeasures.contains(cm); }
  bool slack() const { return platform == PlatformKind::slack; }
  bool teams() const { return platform == PlatformKind::teams; }

  // "slack", "teams+C2", "slack+C1,C5-Alias"
  std::string describe() const;

  static PolicyProfile baseline(PlatformKind platform);
  static PolicyProfile all_countermeasures(PlatformKind platform,
                                           CollisionMode mode = CollisionMode::reject);
};

// Applies one --cm flag value: C1..C6, C5-Reject, C5-Prompt, C5-Alias, all.
Status apply_countermeasure_flag(PolicyProfile& profile, std::string_view flag);

// Whether the scope exists under the profile (split posting scopes need C1;
// Graph and Teams capability scopes need the teams profile).
bool scope_available(Scope scope, const PolicyProfile& profile);

}  // namespace bcpsim
