#pragma once

#include <optional>

#include "bcpsim/core/workspace.hpp"
#include "bcpsim/permission/profile.hpp"
#include "bcpsim/permission/registry.hpp"
#include "bcpsim/permission/trace.hpp"

namespace bcpsim {

struct World {
  const Workspace& workspace;
  const AppRegistry& registry;
};

// Two-level mediation: a Level-1 scope check followed by the profile's
// Level-2 runtime rule. Pure; never mutates the world.
class PermissionEngine {
 public:
  explicit PermissionEngine(PolicyProfile profile) : profile_(std::move(profile)) {}

  const PolicyProfile& profile() const noexcept { return profile_; }

  MediationTrace check(const TokenGrant& token, Operation op, const ResourceRef& resource,
                       const World& world) const;

  // Re-evaluates the scope and rule named by an Allow trace.
  bool replay(const MediationTrace& trace, const TokenGrant& token, const World& world) const;

  // Scope Level 1 would require for this access, if any scope does.
  std::optional<Scope> required_scope(const TokenGrant& token, Operation op,
                                      const ResourceRef& resource, const World& world) const;

  // True if the channel holds another app's bot (or is a DM with a bot).
  static bool is_app_target(const Channel& channel, const AppId& self);

 private:
  struct RuleOutcome {
    RuntimeRule rule = RuntimeRule::none;
    bool pass = true;
    std::optional<DenialReason> denial;
    std::optional<AttachmentOrigin> provenance;
    std::string note;
  };

  RuleOutcome runtime_rule(const TokenGrant& token, Operation op, const ResourceRef& resource,
                           const World& world) const;
  bool can_read_origin(const TokenGrant& token, const AttachmentOrigin& origin,
                       const World& world) const;
  bool rule_holds(RuntimeRule rule, const TokenGrant& token, Operation op,
                  const ResourceRef& resource, const World& world) const;

  PolicyProfile profile_;
};

}  // namespace bcpsim
