#include <algorithm>

#include "bcpsim/victims/apps.hpp"
#include "builtin.hpp"

namespace bcpsim::scenario_detail {

namespace {

constexpr const char* kAttackerHost = "zoom:attacker-org";

struct Official {
  const BootstrapApp* boot = nullptr;
  AppId id;
};

Result<Official> official_app(const Platform& p, const ScenarioOptions& o,
                              const std::string& behavior) {
  const BootstrapApp* b = bootstrap_of(o).app_by_behavior(behavior, o.profile.platform);
  if (!b) return make_error(Errc::invalid_argument, "workspace has no " + behavior + " app");
  auto id = app_named(p, b->manifest.name);
  if (!id) return id.error();
  return Official{b, *id};
}

// Impostor copies the official app's name and icon.
Manifest impostor_of(const Manifest& official, const ScenarioOptions& o, const ScopeSet& grant) {
  Manifest m;
  m.name = official.name;
  m.icon = official.icon;
  m.platform = o.profile.platform;
  if (o.profile.slack()) {
    m.bot_scopes = scope_names(grant);
  } else {
    m.capabilities = scope_names(grant);
  }
  return m;
}

Result<ScenarioRun> command_hijack(const ScenarioOptions& o, bool rename) {
  auto made = make_sim(o);
  if (!made) return made.error();
  ScenarioRun run =
      start_run(o, rename ? "command_hijack_rename" : "command_hijack_create",
                std::move(made).value());
  Platform& p = *run.sim->platform;
  AttackReport& r = run.report;
  const SimTime started = p.now();

  auto official = official_app(p, o, "video_call");
  if (!official) return official.error();
  if (official->boot->manifest.commands.empty()) {
    return make_error(Errc::invalid_argument, "video_call app registers no command");
  }
  const std::string command = official->boot->manifest.commands.front();
  auto victim = user_named(p, o.victim);
  if (!victim) return victim.error();
  auto installer = user_named(p, o.attacker_user);
  if (!installer) return installer.error();
  auto general = channel_named(p, "general");
  if (!general) return general.error();

  const ScopeSet grant = grant_for(o, command_hijack_prerequisites(o));
  r.grant_kind = "bot";
  r.grant_scopes = grant;
  Manifest m = impostor_of(official->boot->manifest, o, grant);
  m.commands = {rename ? "/meet-now" : command};

  auto attacker = p.install_app(m, *installer);
  if (!attacker) {
    block_on(r, attacker.error(), "register " + m.commands.front());
    finish_report(r, p, {}, started);
    return run;
  }
  const bool issuer_check = o.profile.has(Countermeasure::issuer_identity);
  p.set_behavior(*attacker,
                 std::make_unique<VideoCall>(run.sim->ledger, issuer_check, kAttackerHost));
  for (const auto& c : p.registry().commands()) {
    if (c.owner == *attacker) r.notes.push_back("impostor holds " + c.name);
  }
  if (rename) {
    auto renamed = p.rename_command(*attacker, "/meet-now", command);
    if (!renamed) {
      block_on(r, renamed.error(), "rename /meet-now to " + command);
      finish_report(r, p, *attacker, started);
      return run;
    }
    r.notes.push_back("renamed /meet-now to " + *renamed);
  }

  const std::size_t mark = run.sim->ledger.size();
  auto inv = p.invoke_command(*victim, command, *general, "");
  if (!inv) {
    block_on(r, inv.error(), o.victim + " runs " + command);
    finish_report(r, p, *attacker, started);
    return run;
  }
  p.tick(p.now() + 1);

  for (const Effect* e : run.sim->ledger.since(mark)) {
    const auto* meeting = std::get_if<MeetingStarted>(&e->payload);
    if (meeting && meeting->host_account == kAttackerHost && e->app == *attacker) {
      r.effects.push_back(*e);
    }
  }
  if (inv->app == *attacker && !r.effects.empty()) {
    r.verdict = Verdict::succeeded;
    r.artifacts.push_back(command + " from " + o.victim + " routed to impostor " +
                          attacker->str());
  } else {
    r.verdict = Verdict::blocked;
    r.effects.clear();
    r.justifications.push_back("routing unchanged: " + command + " reached " + inv->app.str() +
                               (inv->app == official->id ? " (the original app)" : ""));
  }
  finish_report(r, p, *attacker, started);
  return run;
}

}  // namespace

ScopeSet command_hijack_prerequisites(const ScenarioOptions&) { return {Scope::commands}; }

ScopeSet unfurl_hijack_prerequisites(const ScenarioOptions& o) {
  return {o.profile.slack() ? Scope::links_write : Scope::message_handlers};
}

Result<ScenarioRun> run_command_hijack_create(const ScenarioOptions& o) {
  return command_hijack(o, false);
}

Result<ScenarioRun> run_command_hijack_rename(const ScenarioOptions& o) {
  return command_hijack(o, true);
}

Result<ScenarioRun> run_unfurl_hijack(const ScenarioOptions& o) {
  auto made = make_sim(o);
  if (!made) return made.error();
  ScenarioRun run = start_run(o, "unfurl_hijack", std::move(made).value());
  Platform& p = *run.sim->platform;
  AttackReport& r = run.report;
  const SimTime started = p.now();

  auto official = official_app(p, o, "card_renderer");
  if (!official) return official.error();
  if (official->boot->manifest.unfurl_domains.empty()) {
    return make_error(Errc::invalid_argument, "card_renderer app registers no domain");
  }
  const std::string domain = official->boot->manifest.unfurl_domains.front();
  auto victim = user_named(p, o.victim);
  if (!victim) return victim.error();
  auto installer = user_named(p, o.attacker_user);
  if (!installer) return installer.error();
  auto general = channel_named(p, "general");
  if (!general) return general.error();

  const ScopeSet grant = grant_for(o, unfurl_hijack_prerequisites(o));
  r.grant_kind = "bot";
  r.grant_scopes = grant;
  Manifest m = impostor_of(official->boot->manifest, o, grant);
  m.unfurl_domains = {domain};
  auto attacker = p.install_app(m, *installer);
  if (!attacker) {
    block_on(r, attacker.error(), "register unfurl domain " + domain);
    finish_report(r, p, {}, started);
    return run;
  }
  p.set_behavior(*attacker,
                 std::make_unique<CardRenderer>("Session expired. Sign in again to view"));

  auto carrier = p.user_post(*victim, *general,
                             "Q3 roadmap: https://" + domain + "/documents/view/q3-roadmap");
  if (!carrier) return carrier.error();
  p.tick(p.now() + 2);

  const Message* m_out = p.workspace().find_message(carrier->channel, carrier->id);
  bool impostor_card = false;
  bool official_card = false;
  for (const auto& a : m_out->attachments) {
    if (a.unfurled_by == *attacker) impostor_card = true;
    if (a.unfurled_by == official->id) official_card = true;
  }
  if (impostor_card && !official_card) {
    r.verdict = Verdict::succeeded;
    r.artifacts.push_back("preview of " + domain + " link rendered only by impostor " +
                          attacker->str() + " as \"" + m.name + "\"");
  } else {
    r.verdict = Verdict::blocked;
    if (impostor_card) {
      r.justifications.push_back("the original " + m.name +
                                 " card still rendered beside the impostor's");
    } else if (official_card) {
      r.justifications.push_back("only the original " + m.name + " rendered the preview");
    } else {
      r.justifications.push_back("no preview rendered");
    }
  }
  finish_report(r, p, *attacker, started);
  return run;
}

}  // namespace bcpsim::scenario_detail
