#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcpsim/attacks/report.hpp"
#include "bcpsim/core/bootstrap.hpp"
#include "bcpsim/permission/profile.hpp"
#include "bcpsim/platform/platform.hpp"
#include "bcpsim/victims/ledger.hpp"

namespace bcpsim {

struct ScenarioOptions {
  PolicyProfile profile;
  std::uint64_t seed = 1;
  const Bootstrap* bootstrap = nullptr;  // default workspace when null
  std::string variant;                   // empty: scenario default for the platform
  std::optional<ScopeSet> grant;         // replaces the prerequisite grant
  bool anchor_fallback = false;          // extraction: post+delete when metadata is denied
  std::string victim = "alice";
  std::string attacker_user = "carol";   // installs impostor apps
  std::string target_channel = "secret-plans";
  std::string label;                     // trace label; scenario name when empty
};

// A platform plus the ledger its victim apps write to. Apply issuer checks
// in the victims exactly when the profile exposes issuers.
struct Sim {
  EffectLedger ledger;
  std::unique_ptr<Platform> platform;
};

Result<std::unique_ptr<Sim>> make_sim(const ScenarioOptions& options);

struct ScenarioRun {
  AttackReport report;
  std::unique_ptr<Sim> sim;
};

using ScenarioFn = std::function<Result<ScenarioRun>(const ScenarioOptions&)>;

struct ScenarioInfo {
  std::string name;
  std::string summary;
  std::set<PlatformKind> platforms;
  std::vector<std::string> variants;  // first one per platform is the default
  ScenarioFn run;
  // Least grant the attack needs under `options`.
  std::function<ScopeSet(const ScenarioOptions&)> prerequisites;

  bool supports(PlatformKind p) const { return platforms.contains(p); }
  std::string default_variant(PlatformKind p) const;
  bool variant_supported(const std::string& variant, PlatformKind p) const;
};

const std::vector<ScenarioInfo>& builtin_scenarios();
const ScenarioInfo* find_scenario(std::string_view name);

// Checks platform and variant, fills defaults, then runs.
Result<ScenarioRun> run_scenario(const ScenarioInfo& info, ScenarioOptions options);

// Reruns the scenario once per prerequisite scope with that scope removed.
struct MinimalityResult {
  Scope dropped;
  AttackReport report;
};
Result<std::vector<MinimalityResult>> scope_minimality(const ScenarioInfo& info,
                                                       const ScenarioOptions& options);

// Variant platform for the delegation family ("mail_bridge" -> slack).
std::optional<PlatformKind> delegation_variant_platform(std::string_view variant);

// --- helpers shared by the scenario implementations ---
namespace scenario_detail {

std::set<DenialReason> denials_of(const Platform& p, const AppId& app, std::size_t from = 0);
void add_denial_justifications(AttackReport& r, const std::set<DenialReason>& denials,
                               const std::string& context);
std::size_t max_unfurls_per_second(const Platform& p);
void finish_report(AttackReport& r, const Platform& p, const AppId& attacker, SimTime started);
Result<UserId> user_named(const Platform& p, const std::string& name);
Result<ChannelId> channel_named(const Platform& p, const std::string& name);
Result<AppId> app_named(const Platform& p, const std::string& name);

}  // namespace scenario_detail

}  // namespace bcpsim
