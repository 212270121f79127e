#pragma once

#include "bcpsim/attacks/scenario.hpp"

namespace bcpsim::scenario_detail {

Result<ScenarioRun> run_delegation(const ScenarioOptions& o);
Result<ScenarioRun> run_file_trigger(const ScenarioOptions& o);
Result<ScenarioRun> run_post_removal(const ScenarioOptions& o);
Result<ScenarioRun> run_command_hijack_create(const ScenarioOptions& o);
Result<ScenarioRun> run_command_hijack_rename(const ScenarioOptions& o);
Result<ScenarioRun> run_unfurl_hijack(const ScenarioOptions& o);
Result<ScenarioRun> run_unfurl_extraction(const ScenarioOptions& o);
Result<ScenarioRun> run_pin_extraction(const ScenarioOptions& o);

ScopeSet delegation_prerequisites(const ScenarioOptions& o);
ScopeSet file_trigger_prerequisites(const ScenarioOptions& o);
ScopeSet post_removal_prerequisites(const ScenarioOptions& o);
ScopeSet command_hijack_prerequisites(const ScenarioOptions& o);
ScopeSet unfurl_hijack_prerequisites(const ScenarioOptions& o);
ScopeSet unfurl_extraction_prerequisites(const ScenarioOptions& o);
ScopeSet pin_extraction_prerequisites(const ScenarioOptions& o);

// Scope used for delegated posting under the profile: the human-target
// split scope when finer scopes are on, else the platform's post scope.
Scope delegated_post_scope(const PolicyProfile& profile);

// The grant to use: the override when set, else the prerequisites.
ScopeSet grant_for(const ScenarioOptions& o, const ScopeSet& prerequisites);

// Config value of a bootstrap app ("channel", "emoji", ...), or empty.
std::string app_config(const BootstrapApp& app, const std::string& key);

const Bootstrap& bootstrap_of(const ScenarioOptions& o);

// Report header filled and trace label set.
ScenarioRun start_run(const ScenarioOptions& o, const std::string& name,
                      std::unique_ptr<Sim> sim);
// Records a failed attack step: the denial if there is one, else the error.
void block_on(AttackReport& r, const Error& e, const std::string& context);
// True when the event behind the effect came from content the app issued
// (a message it posted, or a file it uploaded), possibly via delegation.
bool caused_by_app(const Platform& p, const Effect& e, const AppId& app);

}  // namespace bcpsim::scenario_detail
