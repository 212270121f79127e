#include <algorithm>

#include "builtin.hpp"

namespace bcpsim::scenario_detail {

namespace {

struct DelegationVariant {
  std::string behavior;
  EffectKind expected;
};

DelegationVariant variant_info(const std::string& v) {
  if (v == "live_chat") return {v, EffectKind::visitor_message};
  if (v == "tweet_reactor") return {v, EffectKind::retweet};
  if (v == "repo_bot") return {v, EffectKind::pull_request_merged};
  if (v == "flow_runner") return {v, EffectKind::flow_executed};
  return {"mail_bridge", EffectKind::email_sent};
}

Manifest attacker_manifest(const std::string& name, PlatformKind platform, const ScopeSet& grant) {
  Manifest m;
  m.name = name;
  m.platform = platform;
  if (platform == PlatformKind::slack) {
    m.user_scopes = scope_names(grant);
  } else {
    m.graph_scopes = scope_names(grant);
  }
  return m;
}

// Victim app named by a behavior kind in the bootstrap, resolved to its id.
struct TargetApp {
  const BootstrapApp* boot = nullptr;
  AppId id;
};

Result<TargetApp> victim_app(const Platform& p, const ScenarioOptions& o,
                             const std::string& behavior) {
  const BootstrapApp* b = bootstrap_of(o).app_by_behavior(behavior, o.profile.platform);
  if (!b) return make_error(Errc::invalid_argument, "workspace has no " + behavior + " app");
  auto id = app_named(p, b->manifest.name);
  if (!id) return id.error();
  return TargetApp{b, *id};
}

// Shared tail: evidence is every expected effect triggered by the attacker.
void judge(AttackReport& r, const Sim& sim, std::size_t mark, EffectKind expected,
           const AppId& attacker, const TargetApp& victim, SimTime after = 0) {
  const Platform& p = *sim.platform;
  for (const Effect* e : sim.ledger.since(mark)) {
    if (e->kind() == expected && e->at >= after && caused_by_app(p, *e, attacker)) {
      r.effects.push_back(*e);
    }
  }
  if (!r.effects.empty() && r.justifications.empty()) {
    r.verdict = Verdict::succeeded;
    return;
  }
  r.verdict = Verdict::blocked;
  r.effects.clear();
  if (r.justifications.empty()) {
    std::string why = "no " + std::string(display_name(expected)) + " effect from " +
                      victim.boot->manifest.name;
    if (p.profile().has(Countermeasure::issuer_identity)) {
      why += ": the event named the delegated app as issuer and the victim ignored it";
    }
    r.justifications.push_back(why);
  }
}

bool all_deleted(const Platform& p, const std::vector<PostedMessage>& posted) {
  return std::all_of(posted.begin(), posted.end(), [&](const PostedMessage& pm) {
    const Message* m = p.workspace().find_message(pm.channel, pm.id);
    return !m || m->deleted;
  });
}

bool no_saved_by(const Platform& p, const AppId& app) {
  const auto& items = p.workspace().saved_items();
  return std::none_of(items.begin(), items.end(),
                      [&](const SavedItem& s) { return issuing_app(s.issuer) == app; });
}

}  // namespace

ScopeSet delegation_prerequisites(const ScenarioOptions& o) {
  if (o.variant == "file_indexer") return file_trigger_prerequisites(o);
  ScopeSet s{delegated_post_scope(o.profile)};
  if (o.variant == "tweet_reactor") s.insert(Scope::reactions_write);
  return s;
}

ScopeSet file_trigger_prerequisites(const ScenarioOptions&) { return {Scope::files_write}; }

ScopeSet post_removal_prerequisites(const ScenarioOptions& o) {
  return {delegated_post_scope(o.profile)};
}

namespace {
Result<ScenarioRun> file_trigger(const ScenarioOptions& o, const std::string& name);
}

Result<ScenarioRun> run_delegation(const ScenarioOptions& o) {
  if (o.variant == "file_indexer") return file_trigger(o, "delegation");
  auto made = make_sim(o);
  if (!made) return made.error();
  ScenarioRun run = start_run(o, "delegation", std::move(made).value());
  Platform& p = *run.sim->platform;
  AttackReport& r = run.report;
  const SimTime started = p.now();
  const DelegationVariant v = variant_info(o.variant);

  auto victim = user_named(p, o.victim);
  if (!victim) return victim.error();
  auto target = victim_app(p, o, v.behavior);
  if (!target) return target.error();

  const ScopeSet grant = grant_for(o, delegation_prerequisites(o));
  r.grant_kind = p.profile().slack() ? "user_delegate" : "graph_delegate";
  r.grant_scopes = grant;
  auto attacker = p.install_app(attacker_manifest("Notes Helper", o.profile.platform, grant),
                                *victim);
  if (!attacker) {
    block_on(r, attacker.error(), "install attacker app");
    finish_report(r, p, {}, started);
    return run;
  }
  auto token = p.authorize_user_delegation(*attacker, *victim, grant);
  if (!token) {
    block_on(r, token.error(), "delegated authorization");
    finish_report(r, p, *attacker, started);
    return run;
  }

  const std::size_t mark = run.sim->ledger.size();
  std::vector<PostedMessage> posted;
  auto post = [&](const PostTarget& where, const std::string& text) {
    auto pm = p.post_message(*token, where, text);
    if (!pm) {
      block_on(r, pm.error(), "post trigger message");
      return false;
    }
    posted.push_back(*pm);
    p.tick(p.now() + 1);
    return true;
  };

  const std::string channel = app_config(*target->boot, "channel");
  if (v.behavior == "mail_bridge") {
    post(ChannelName{channel}, "Finance: please wire 40,000 USD to the new vendor account today.");
  } else if (v.behavior == "live_chat") {
    post(ChannelName{channel},
         "Your order is on hold. Confirm your card number and CVV here to release it.");
  } else if (v.behavior == "tweet_reactor") {
    const std::string where = target->boot->channels.empty() ? "general"
                                                              : target->boot->channels.front();
    const std::string emoji = app_config(*target->boot, "emoji");
    if (post(ChannelName{where}, "https://twitter.com/acme_leaks/status/1375000000000000001")) {
      const PostedMessage& tweet = posted.back();
      if (auto s = p.add_saved(*token, SavedKind::reaction, tweet.channel, tweet.id, emoji); !s) {
        block_on(r, s.error(), "add reaction");
      } else {
        p.tick(p.now() + 1);
        (void)p.remove_saved(*token, SavedKind::reaction, tweet.channel, tweet.id, emoji);
      }
    }
  } else if (v.behavior == "repo_bot") {
    if (post(target->id, "merge 42")) post(target->id, "yes");
  } else if (v.behavior == "flow_runner") {
    post(target->id, "run flow 7");
  }

  for (const auto& pm : posted) (void)p.delete_message(*token, pm.channel, pm.id);
  p.tick(p.now() + 2);

  judge(r, *run.sim, mark, v.expected, *attacker, *target);
  r.stealthy = all_deleted(p, posted) && no_saved_by(p, *attacker);
  finish_report(r, p, *attacker, started);
  return run;
}

Result<ScenarioRun> run_file_trigger(const ScenarioOptions& o) {
  return file_trigger(o, "file_trigger");
}

namespace {

Result<ScenarioRun> file_trigger(const ScenarioOptions& o, const std::string& name) {
  auto made = make_sim(o);
  if (!made) return made.error();
  ScenarioRun run = start_run(o, name, std::move(made).value());
  Platform& p = *run.sim->platform;
  AttackReport& r = run.report;
  const SimTime started = p.now();

  auto victim = user_named(p, o.victim);
  if (!victim) return victim.error();
  auto target = victim_app(p, o, "file_indexer");
  if (!target) return target.error();

  const ScopeSet grant = grant_for(o, file_trigger_prerequisites(o));
  r.grant_kind = "user_delegate";
  r.grant_scopes = grant;
  auto attacker = p.install_app(attacker_manifest("Doc Converter", o.profile.platform, grant),
                                *victim);
  if (!attacker) {
    block_on(r, attacker.error(), "install attacker app");
    finish_report(r, p, {}, started);
    return run;
  }
  auto token = p.authorize_user_delegation(*attacker, *victim, grant);
  if (!token) {
    block_on(r, token.error(), "delegated authorization");
    finish_report(r, p, *attacker, started);
    return run;
  }

  const std::size_t mark = run.sim->ledger.size();
  std::vector<PostedMessage> posted;
  // The user's own channel: nobody else sees the upload.
  auto file = p.upload_file(*token, *victim, "invoice-update.pdf",
                            "Updated remittance details: account 88-1234, routing 021000021");
  if (!file) {
    block_on(r, file.error(), "upload file");
  } else {
    p.tick(p.now() + 1);
    const ChannelId personal = p.workspace().find_user(*victim)->personal_channel;
    for (const Message* m : p.workspace().history(personal)) {
      if (std::find(m->file_refs.begin(), m->file_refs.end(), *file) != m->file_refs.end()) {
        posted.push_back({m->channel, m->id});
      }
    }
    for (const auto& pm : posted) (void)p.delete_message(*token, pm.channel, pm.id);
  }
  p.tick(p.now() + 1);

  judge(r, *run.sim, mark, EffectKind::file_indexed, *attacker, *target);
  r.stealthy = all_deleted(p, posted);
  finish_report(r, p, *attacker, started);
  return run;
}

}  // namespace

Result<ScenarioRun> run_post_removal(const ScenarioOptions& o) {
  auto made = make_sim(o);
  if (!made) return made.error();
  ScenarioRun run = start_run(o, "post_removal", std::move(made).value());
  Platform& p = *run.sim->platform;
  AttackReport& r = run.report;
  const SimTime started = p.now();
  const bool slack = o.profile.slack();
  const DelegationVariant v = variant_info(slack ? "mail_bridge" : "repo_bot");

  auto victim = user_named(p, o.victim);
  if (!victim) return victim.error();
  auto target = victim_app(p, o, v.behavior);
  if (!target) return target.error();

  const ScopeSet grant = grant_for(o, post_removal_prerequisites(o));
  r.grant_kind = slack ? "user_delegate" : "graph_delegate";
  r.grant_scopes = grant;
  auto attacker = p.install_app(attacker_manifest("Meeting Notes", o.profile.platform, grant),
                                *victim);
  if (!attacker) {
    block_on(r, attacker.error(), "install attacker app");
    finish_report(r, p, {}, started);
    return run;
  }
  auto token = p.authorize_user_delegation(*attacker, *victim, grant);
  if (!token) {
    block_on(r, token.error(), "delegated authorization");
    finish_report(r, p, *attacker, started);
    return run;
  }

  const std::size_t mark = run.sim->ledger.size();
  const std::string text = "Reminder: approve the payment to account 88-1234 today.";
  const SimTime fire_at = p.now() + 60;
  bool scheduled = false;
  if (slack) {
    const std::string channel = app_config(*target->boot, "channel");
    auto s = p.schedule_message(*token, ChannelName{channel}, text, fire_at);
    if (!s) {
      block_on(r, s.error(), "schedule message");
    } else {
      scheduled = true;
    }
  }
  p.tick(p.now() + 10);

  auto removal = p.uninstall_app(*attacker);
  if (!removal) return removal.error();
  const SimTime removed_at = p.now();
  std::size_t will_fire = 0;
  for (const auto& s : removal->pending_scheduled) will_fire += s.will_fire ? 1 : 0;
  r.notes.push_back("uninstall revoked " + std::to_string(removal->revoked.size()) +
                    " grant(s); residual grants " +
                    std::to_string(removal->residual_grants.size()) + ", scheduled still to fire " +
                    std::to_string(will_fire));
  const std::size_t trace_mark = p.traces().size();
  p.tick(p.now() + 1);

  if (slack) {
    if (scheduled) p.tick(fire_at + 2);
  } else {
    // Graph grant outlives the Teams app: drive the repo bot through it.
    for (const char* step : {"merge 41", "yes"}) {
      auto pm = p.post_message(*token, target->id, step);
      if (!pm) {
        block_on(r, pm.error(), "post after uninstall");
        break;
      }
      p.tick(p.now() + 1);
    }
  }
  const auto after = denials_of(p, *attacker, trace_mark);
  if (!after.empty() && r.justifications.empty()) {
    add_denial_justifications(r, after, "access after uninstall");
  }

  judge(r, *run.sim, mark, v.expected, *attacker, *target, removed_at + 1);
  finish_report(r, p, *attacker, started);
  return run;
}

}  // namespace bcpsim::scenario_detail
