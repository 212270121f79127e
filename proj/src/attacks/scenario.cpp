#include "bcpsim/attacks/scenario.hpp"

#include <algorithm>
#include <map>

#include <json.hpp>

#include "bcpsim/victims/apps.hpp"
#include "builtin.hpp"

namespace bcpsim {

Result<std::unique_ptr<Sim>> make_sim(const ScenarioOptions& options) {
  const Bootstrap& boot = options.bootstrap ? *options.bootstrap : default_bootstrap();
  auto sim = std::make_unique<Sim>();
  const bool issuer_check = options.profile.has(Countermeasure::issuer_identity);
  auto platform = Platform::from_bootstrap(boot, options.profile, options.seed,
                                           victim_factory(sim->ledger, issuer_check),
                                           options.label.empty() ? "run" : options.label);
  if (!platform) return platform.error();
  sim->platform = std::move(platform).value();
  return sim;
}

std::string ScenarioInfo::default_variant(PlatformKind p) const {
  for (const auto& v : variants) {
    if (variant_supported(v, p)) return v;
  }
  return {};
}

bool ScenarioInfo::variant_supported(const std::string& variant, PlatformKind p) const {
  if (std::find(variants.begin(), variants.end(), variant) == variants.end()) return false;
  if (auto vp = delegation_variant_platform(variant)) return *vp == p;
  return true;
}

std::optional<PlatformKind> delegation_variant_platform(std::string_view variant) {
  if (variant == "mail_bridge" || variant == "live_chat" || variant == "tweet_reactor" ||
      variant == "file_indexer") {
    return PlatformKind::slack;
  }
  if (variant == "repo_bot" || variant == "flow_runner") return PlatformKind::teams;
  return std::nullopt;
}

const std::vector<ScenarioInfo>& builtin_scenarios() {
  using namespace scenario_detail;
  static const std::vector<ScenarioInfo> list = {
      {"delegation",
       "delegated app posts trigger messages as a user; a victim app acts on them",
       {PlatformKind::slack, PlatformKind::teams},
       {"mail_bridge", "live_chat", "tweet_reactor", "file_indexer", "repo_bot", "flow_runner"},
       run_delegation,
       delegation_prerequisites},
      {"file_trigger",
       "delegated upload into the user's own channel triggers a file indexer",
       {PlatformKind::slack},
       {},
       run_file_trigger,
       file_trigger_prerequisites},
      {"post_removal",
       "actions that outlive the app's uninstall",
       {PlatformKind::slack, PlatformKind::teams},
       {},
       run_post_removal,
       post_removal_prerequisites},
      {"command_hijack_create",
       "impostor app registers an existing slash command",
       {PlatformKind::slack},
       {},
       run_command_hijack_create,
       command_hijack_prerequisites},
      {"command_hijack_rename",
       "impostor app renames its own command onto an existing one",
       {PlatformKind::slack},
       {},
       run_command_hijack_rename,
       command_hijack_prerequisites},
      {"unfurl_hijack",
       "impostor app registers another app's link-preview domain",
       {PlatformKind::slack, PlatformKind::teams},
       {},
       run_unfurl_hijack,
       unfurl_hijack_prerequisites},
      {"unfurl_extraction",
       "guessed message URLs unfurled into the user's own channel",
       {PlatformKind::slack},
       {},
       run_unfurl_extraction,
       unfurl_extraction_prerequisites},
      {"pin_extraction",
       "guessed message ids pinned, starred, or reacted to, then listed",
       {PlatformKind::slack},
       {"pin", "star", "reaction"},
       run_pin_extraction,
       pin_extraction_prerequisites},
  };
  return list;
}

const ScenarioInfo* find_scenario(std::string_view name) {
  for (const auto& s : builtin_scenarios()) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

Result<ScenarioRun> run_scenario(const ScenarioInfo& info, ScenarioOptions options) {
  const PlatformKind p = options.profile.platform;
  if (!info.supports(p)) {
    return make_error(Errc::unsupported,
                      info.name + " does not apply to " + std::string(to_string(p)));
  }
  if (!info.variants.empty()) {
    if (options.variant.empty()) options.variant = info.default_variant(p);
    if (!info.variant_supported(options.variant, p)) {
      return make_error(Errc::invalid_argument, "variant \"" + options.variant +
                                                    "\" is not available for " + info.name +
                                                    " on " + std::string(to_string(p)));
    }
  } else if (!options.variant.empty()) {
    return make_error(Errc::invalid_argument, info.name + " has no variants");
  }
  if (options.label.empty()) options.label = info.name;
  auto run = info.run(options);
  if (!run) return run;
  if (auto v = run.value().report.validate(); !v) return v.error();
  return run;
}

Result<std::vector<MinimalityResult>> scope_minimality(const ScenarioInfo& info,
                                                       const ScenarioOptions& options) {
  ScenarioOptions base = options;
  if (base.variant.empty()) base.variant = info.default_variant(base.profile.platform);
  const ScopeSet full = base.grant ? *base.grant : info.prerequisites(base);
  std::vector<MinimalityResult> out;
  for (Scope s : full) {
    ScenarioOptions o = base;
    ScopeSet reduced = full;
    reduced.erase(s);
    o.grant = reduced;
    auto run = run_scenario(info, o);
    if (!run) return run.error();
    out.push_back({s, std::move(run).value().report});
  }
  return out;
}

namespace scenario_detail {

std::set<DenialReason> denials_of(const Platform& p, const AppId& app, std::size_t from) {
  std::set<DenialReason> out;
  const auto& traces = p.traces();
  for (std::size_t i = from; i < traces.size(); ++i) {
    if (traces[i].app == app && !traces[i].allow && traces[i].denial) {
      out.insert(*traces[i].denial);
    }
  }
  return out;
}

void add_denial_justifications(AttackReport& r, const std::set<DenialReason>& denials,
                               const std::string& context) {
  for (auto d : denials) {
    r.denials.insert(d);
    r.justifications.push_back(std::string(to_string(d)) + ": " + context);
  }
}

std::size_t max_unfurls_per_second(const Platform& p) {
  std::map<SimTime, std::size_t> per_second;
  for (const auto& u : p.unfurl_log()) ++per_second[u.resolved_at];
  std::size_t best = 0;
  for (const auto& [t, n] : per_second) best = std::max(best, n);
  return best;
}

void finish_report(AttackReport& r, const Platform& p, const AppId& attacker, SimTime started) {
  r.profile = p.profile().describe();
  r.api_calls = attacker.empty() ? 0 : p.api_calls(attacker);
  r.sim_duration = p.now() - started;
  r.max_unfurls_per_second = max_unfurls_per_second(p);
  // Every denial the attacker hit is part of the record, even when the
  // verdict rests on something else.
  if (!attacker.empty()) {
    for (auto d : denials_of(p, attacker)) r.denials.insert(d);
  }
  if (r.verdict == Verdict::blocked && r.justifications.empty()) {
    for (auto d : r.denials) {
      r.justifications.push_back(std::string(to_string(d)) + ": denied during the attack");
    }
  }
}

Result<UserId> user_named(const Platform& p, const std::string& name) {
  const User* u = p.workspace().user_by_name(name);
  if (!u) return make_error(Errc::invalid_argument, "workspace has no user \"" + name + "\"");
  return u->id;
}

Result<ChannelId> channel_named(const Platform& p, const std::string& name) {
  const Channel* c = p.workspace().channel_by_name(name);
  if (!c) return make_error(Errc::invalid_argument, "workspace has no channel \"" + name + "\"");
  return c->id;
}

Result<AppId> app_named(const Platform& p, const std::string& name) {
  const InstalledApp* a = p.registry().app_by_name(name);
  if (!a) return make_error(Errc::invalid_argument, "no installed app \"" + name + "\"");
  return a->id;
}

Scope delegated_post_scope(const PolicyProfile& profile) {
  if (profile.has(Countermeasure::finer_scopes)) return Scope::chat_write_human;
  return profile.slack() ? Scope::chat_write : Scope::chat_read_write;
}

ScopeSet grant_for(const ScenarioOptions& o, const ScopeSet& prerequisites) {
  return o.grant ? *o.grant : prerequisites;
}

std::string app_config(const BootstrapApp& app, const std::string& key) {
  auto j = nlohmann::json::parse(app.config_json, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains(key) || !j[key].is_string()) return {};
  return j[key].get<std::string>();
}

const Bootstrap& bootstrap_of(const ScenarioOptions& o) {
  return o.bootstrap ? *o.bootstrap : default_bootstrap();
}

ScenarioRun start_run(const ScenarioOptions& o, const std::string& name,
                      std::unique_ptr<Sim> sim) {
  ScenarioRun run;
  run.report.scenario = name;
  run.report.variant = o.variant;
  run.report.seed = o.seed;
  run.report.profile = o.profile.describe();
  sim->platform->set_trace_label(o.label.empty() ? name : o.label);
  run.sim = std::move(sim);
  return run;
}

void block_on(AttackReport& r, const Error& e, const std::string& context) {
  r.verdict = Verdict::blocked;
  if (e.denial) {
    r.denials.insert(*e.denial);
    r.justifications.push_back(std::string(to_string(*e.denial)) + ": " + context);
  } else {
    r.justifications.push_back(context + ": " + e.message());
  }
}

bool caused_by_app(const Platform& p, const Effect& e, const AppId& app) {
  const Event* ev = p.find_event(e.caused_by);
  if (!ev) return false;
  if (ev->file) {
    const File* f = p.workspace().find_file(*ev->file);
    return f && issuing_app(f->uploader) == app;
  }
  if (ev->message) {
    const Message* m = p.workspace().find_message(ev->channel, *ev->message);
    return m && issuing_app(m->issuer) == app;
  }
  return false;
}

}  // namespace scenario_detail

}  // namespace bcpsim
