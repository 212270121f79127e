// Acceptance checks, one line per criterion. Exit status is the number of
// failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "../oracles.hpp"
#include "../support.hpp"
#include "bcpsim/attacks/guess.hpp"
#include "bcpsim/audit/audit.hpp"
#include "bcpsim/core/bootstrap.hpp"
#include "bcpsim/core/url.hpp"
#include "bcpsim/platform/platform.hpp"
#include "bcpsim/victims/ledger.hpp"

using namespace bcpsim;
using namespace bcpsim::test;

namespace {

// Pinned tolerances.
constexpr std::size_t kWindowMessages = 30;
constexpr std::size_t kAllowedMisses = 0;
constexpr std::size_t kMaxUnfurlsPerSecond = 5;
constexpr SimTime kWindowSeconds = 300;
constexpr int kGuessTrials = 1000;
constexpr int kCounterSteps = 50;
constexpr double kMaxSecondsPerCriterion = 5.0;
constexpr double kPercentEps = 1e-9;

struct Check {
  bool ok = true;
  std::vector<std::string> failures;
  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (failures.size() < 6) failures.push_back(what);
    }
  }
};

using Criterion = std::function<std::string(Check&)>;

std::string scopes_str(const ScopeSet& s) { return "{" + join_scopes(s) + "}"; }

ScopeSet scopes(std::initializer_list<Scope> l) { return ScopeSet(l); }

// --- 1 ------------------------------------------------------------------

std::string delegation_suite(Check& c) {
  struct Case {
    std::string variant;
    PlatformKind platform;
    ScopeSet grant;
    EffectKind effect;
  };
  const std::vector<Case> cases = {
      {"mail_bridge", PlatformKind::slack, scopes({Scope::chat_write}), EffectKind::email_sent},
      {"live_chat", PlatformKind::slack, scopes({Scope::chat_write}), EffectKind::visitor_message},
      {"repo_bot", PlatformKind::teams, scopes({Scope::chat_read_write}),
       EffectKind::pull_request_merged},
      {"flow_runner", PlatformKind::teams, scopes({Scope::chat_read_write}),
       EffectKind::flow_executed},
      {"tweet_reactor", PlatformKind::slack, scopes({Scope::chat_write, Scope::reactions_write}),
       EffectKind::retweet},
  };
  int succeeded = 0, blocked = 0;
  for (const auto& k : cases) {
    auto base = run("delegation", profile_of(k.platform), k.variant);
    const auto& r = base.report;
    bool ok = r.verdict == Verdict::succeeded;
    c.expect(ok, k.variant + ": baseline verdict " + std::string(to_string(r.verdict)));
    c.expect(r.grant_scopes == k.grant,
             k.variant + ": grant " + scopes_str(r.grant_scopes) + " != " + scopes_str(k.grant));
    c.expect(!r.effects.empty(), k.variant + ": no ledger evidence");
    for (const auto& e : r.effects) {
      c.expect(e.kind() == k.effect, k.variant + ": unexpected effect " + e.summary());
      ok = ok && e.kind() == k.effect;
    }
    // Every matching ledger entry traces back to a delegated trigger.
    for (const auto& e : base.sim->ledger.entries()) {
      if (e.kind() != k.effect) continue;
      const Event* ev = base.sim->platform->find_event(e.caused_by);
      c.expect(ev != nullptr, k.variant + ": effect without a causing event");
    }
    succeeded += ok && r.grant_scopes == k.grant && !r.effects.empty();

    bool both_blocked = true;
    for (const char* cm : {"C1", "C4"}) {
      auto guarded = run("delegation", profile_of(k.platform, {cm}), k.variant);
      const bool b = guarded.report.verdict == Verdict::blocked && guarded.report.effects.empty();
      c.expect(b, k.variant + " under " + cm + ": not blocked");
      both_blocked = both_blocked && b;
    }
    blocked += both_blocked;
  }
  std::ostringstream os;
  os << succeeded << "/5 succeed on baseline, " << blocked << "/5 blocked under C1 and C4";
  return os.str();
}

// --- 2 ------------------------------------------------------------------

std::string post_removal(Check& c) {
  std::ostringstream os;
  for (auto p : {PlatformKind::slack, PlatformKind::teams}) {
    const std::string name(to_string(p));
    auto base = run("post_removal", profile_of(p));
    c.expect(base.report.verdict == Verdict::succeeded, name + ": baseline not Succeeded");
    c.expect(base.report.has_evidence(), name + ": no evidence after removal");
    auto c6 = run("post_removal", profile_of(p, {"C6"}));
    c.expect(c6.report.verdict == Verdict::blocked, name + ": C6 not Blocked");
    c.expect(c6.report.denials.contains(DenialReason::revoked), name + ": C6 without revoked");
    c.expect(c6.report.effects.empty(), name + ": C6 still has effects");
    os << name << " " << to_string(base.report.verdict) << "/" << to_string(c6.report.verdict)
       << " ";
  }
  os << "(baseline/C6)";
  return os.str();
}

// --- 3 ------------------------------------------------------------------

std::optional<std::string> official_zoom_host() {
  ScenarioOptions o;
  o.profile = PolicyProfile::baseline(PlatformKind::slack);
  auto sim = make_sim(o);
  if (!sim) return std::nullopt;
  Platform& p = *(*sim)->platform;
  const User* alice = p.workspace().user_by_name("alice");
  const Channel* general = p.workspace().channel_by_name("general");
  if (!alice || !general) return std::nullopt;
  if (!p.invoke_command(alice->id, "/zoom", general->id)) return std::nullopt;
  p.tick(p.now() + 1);
  for (const auto& e : (*sim)->ledger.entries()) {
    if (const auto* m = std::get_if<MeetingStarted>(&e.payload)) return m->host_account;
  }
  return std::nullopt;
}

std::string command_hijack(Check& c) {
  const auto control = official_zoom_host();
  c.expect(control.has_value(), "control /zoom run produced no meeting");
  const std::string attacker = "zoom:attacker-org";
  c.expect(control != attacker, "control meeting already hosted by the attacker");
  std::ostringstream os;
  os << "control host " << control.value_or("?") << "; ";
  for (const char* name : {"command_hijack_create", "command_hijack_rename"}) {
    auto base = run(name, profile_of(PlatformKind::slack));
    std::optional<std::string> host;
    for (const auto& e : base.sim->ledger.entries()) {
      if (const auto* m = std::get_if<MeetingStarted>(&e.payload)) host = m->host_account;
    }
    c.expect(base.report.verdict == Verdict::succeeded, std::string(name) + ": not Succeeded");
    c.expect(host == attacker, std::string(name) + ": host " + host.value_or("none"));
    for (const char* cm : {"C5-Reject", "C5-Alias"}) {
      auto g = run(name, profile_of(PlatformKind::slack, {cm}));
      c.expect(g.report.verdict == Verdict::blocked, std::string(name) + " " + cm + ": not Blocked");
      for (const auto& e : g.sim->ledger.entries()) {
        if (const auto* m = std::get_if<MeetingStarted>(&e.payload)) {
          c.expect(m->host_account != attacker, std::string(name) + " " + cm + ": attacker host");
        }
      }
    }
    os << name << " host " << host.value_or("none") << " ";
  }
  return os.str();
}

// --- 4 ------------------------------------------------------------------

std::string unfurl_hijack(Check& c) {
  auto teams = run("unfurl_hijack", profile_of(PlatformKind::teams));
  c.expect(teams.report.verdict == Verdict::succeeded, "teams baseline not Succeeded");
  auto slack = run("unfurl_hijack", profile_of(PlatformKind::slack));
  c.expect(slack.report.verdict == Verdict::blocked, "slack baseline not Blocked");
  std::size_t slack_renderers = 0, teams_renderers = 0;
  for (const auto& u : slack.sim->platform->unfurl_log()) {
    if (url_host(u.url) == "lucid.app") slack_renderers = u.renderers.size();
  }
  for (const auto& u : teams.sim->platform->unfurl_log()) {
    if (url_host(u.url) == "lucid.app") teams_renderers = u.renderers.size();
  }
  c.expect(slack_renderers == 2, "slack rendered " + std::to_string(slack_renderers) + " cards");
  c.expect(teams_renderers == 1, "teams rendered " + std::to_string(teams_renderers) + " cards");
  return "teams " + std::string(to_string(teams.report.verdict)) + " (" +
         std::to_string(teams_renderers) + " card), slack " +
         std::string(to_string(slack.report.verdict)) + " (" + std::to_string(slack_renderers) +
         " cards)";
}

// --- 5, 6 ---------------------------------------------------------------

// Non-deleted messages posted in the target channel since the workspace started.
std::map<MessageId, std::string> window_truth(const ScenarioRun& run, const std::string& channel,
                                              Check& c) {
  const Platform& p = *run.sim->platform;
  const Channel* ch = p.workspace().channel_by_name(channel);
  std::map<MessageId, std::string> truth;
  if (!ch) return truth;
  const SimTime start = default_bootstrap().start_time;
  bool user_post = false, app_post = false, file_post = false;
  SimTime first = 0, last = 0;
  for (const Message* m : p.workspace().all_messages(ch->id)) {
    if (m->id.timestamp_s < start || m->deleted) continue;
    if (truth.empty()) first = m->id.timestamp_s;
    last = m->id.timestamp_s;
    truth[m->id] = m->text;
    user_post |= m->action == PostAction::user_text;
    app_post |= m->action == PostAction::app_text;
    file_post |= m->action == PostAction::file_only || !m->file_refs.empty();
  }
  c.expect(truth.size() == kWindowMessages,
           "history has " + std::to_string(truth.size()) + " window messages");
  c.expect(last - first <= kWindowSeconds, "history spans " + std::to_string(last - first) + " s");
  c.expect(user_post && app_post && file_post, "history lacks user, app, or file posts");
  return truth;
}

std::size_t check_leaks(const ScenarioRun& run, const std::map<MessageId, std::string>& truth,
                        Check& c, const std::string& what) {
  std::size_t hits = 0;
  std::set<MessageId> seen;
  for (const auto& l : run.report.leaked) {
    auto it = truth.find(l.message);
    c.expect(it != truth.end(), what + ": leaked a message outside the window");
    if (it == truth.end()) continue;
    const bool same = l.truncated ? it->second.compare(0, l.content.size(), l.content) == 0
                                  : it->second == l.content;
    c.expect(same, what + ": leaked content differs for " + l.message.str());
    if (same && seen.insert(l.message).second) ++hits;
  }
  return hits;
}

std::size_t max_per_second(const Platform& p) {
  std::map<SimTime, std::size_t> per;
  std::size_t best = 0;
  for (const auto& u : p.unfurl_log()) best = std::max(best, ++per[u.resolved_at]);
  return best;
}

std::string unfurl_extraction(Check& c) {
  auto base = run("unfurl_extraction", profile_of(PlatformKind::slack));
  const auto truth = window_truth(base, "secret-plans", c);
  const ScopeSet want = scopes({Scope::groups_read, Scope::chat_write, Scope::im_history});
  c.expect(base.report.grant_scopes == want, "grant " + scopes_str(base.report.grant_scopes));
  c.expect(!base.report.grant_scopes.contains(Scope::groups_history), "grant holds groups:history");
  const std::size_t hits = check_leaks(base, truth, c, "baseline");
  c.expect(truth.size() - std::min(hits, truth.size()) <= kAllowedMisses,
           "missed " + std::to_string(truth.size() - hits) + " messages");
  c.expect(base.report.verdict == Verdict::succeeded, "baseline not Succeeded");
  const std::size_t peak = max_per_second(*base.sim->platform);
  c.expect(peak <= kMaxUnfurlsPerSecond, "peak " + std::to_string(peak) + " unfurls/s");

  auto c2 = run("unfurl_extraction", profile_of(PlatformKind::slack, {"C2"}));
  c.expect(c2.report.leaked.empty(), "C2 leaked " + std::to_string(c2.report.leaked.size()));
  c.expect(c2.report.verdict == Verdict::blocked, "C2 not Blocked");
  c.expect(c2.report.denials.contains(DenialReason::provenance_blocked), "C2 without provenance_blocked");
  std::ostringstream os;
  os << hits << "/" << truth.size() << " leaked with " << scopes_str(base.report.grant_scopes)
     << ", peak " << peak << " unfurls/s; C2 " << c2.report.leaked.size() << "/" << truth.size();
  return os.str();
}

std::string pin_extraction(Check& c) {
  struct Case {
    std::string variant;
    Scope read, write;
  };
  const std::vector<Case> cases = {{"pin", Scope::pins_read, Scope::pins_write},
                                   {"star", Scope::stars_read, Scope::stars_write},
                                   {"reaction", Scope::reactions_read, Scope::reactions_write}};
  ScenarioOptions fresh;
  fresh.profile = PolicyProfile::baseline(PlatformKind::slack);
  auto initial = make_sim(fresh);
  const std::vector<SavedItem> before =
      initial ? (*initial)->platform->workspace().saved_items() : std::vector<SavedItem>{};

  std::ostringstream os;
  std::map<std::string, std::set<MessageId>> leaked_sets;
  for (const auto& k : cases) {
    auto base = run("pin_extraction", profile_of(PlatformKind::slack), k.variant);
    const auto truth = window_truth(base, "secret-plans", c);
    const ScopeSet want = scopes({Scope::groups_read, k.read, k.write});
    c.expect(base.report.grant_scopes == want,
             k.variant + ": grant " + scopes_str(base.report.grant_scopes));
    const std::size_t hits = check_leaks(base, truth, c, k.variant);
    c.expect(hits == truth.size(), k.variant + ": " + std::to_string(hits) + " leaked");
    c.expect(base.report.verdict == Verdict::succeeded, k.variant + ": not Succeeded");
    c.expect(base.sim->platform->workspace().saved_items() == before,
             k.variant + ": saved state changed");
    for (const auto& l : base.report.leaked) leaked_sets[k.variant].insert(l.message);

    auto c3 = run("pin_extraction", profile_of(PlatformKind::slack, {"C3"}), k.variant);
    c.expect(c3.report.leaked.empty(), k.variant + " C3: leaked " +
                                           std::to_string(c3.report.leaked.size()));
    c.expect(c3.report.verdict == Verdict::blocked, k.variant + " C3: not Blocked");
    c.expect(c3.report.denials.contains(DenialReason::self_op_blocked),
             k.variant + " C3: without self_op_blocked");
    os << k.variant << " " << hits << "/" << truth.size() << " (C3 " << c3.report.leaked.size()
       << ") ";
  }
  c.expect(leaked_sets["reaction"] == leaked_sets["pin"], "reaction and pin leaked sets differ");
  c.expect(leaked_sets["star"] == leaked_sets["pin"], "star and pin leaked sets differ");
  os << "; saved state unchanged";
  return os.str();
}

// --- 7 ------------------------------------------------------------------

std::string guess_completeness(Check& c) {
  std::mt19937_64 rng(20210324);
  std::uniform_int_distribution<int> actions(0, 40), kind(0, 3), dt(0, 6);
  std::uniform_int_distribution<std::uint32_t> start_counter(0, 50000);
  int covered = 0, sized = 0, nonempty_formula = 0;
  for (int trial = 0; trial < kGuessTrials; ++trial) {
    SimTime t = 1616600000 + trial * 1000;
    std::uint32_t counter = start_counter(rng) * 100;
    std::vector<MessageId> ids{{t, counter}};
    const int n = actions(rng) + 1;
    for (int i = 0; i < n; ++i) {
      t += static_cast<SimTime>(dt(rng));
      counter += kind(rng) == 0 ? 200 : 100;
      ids.push_back({t, counter});
    }
    const IdAnchorPair anchors{ids.front(), ids.back()};
    auto guessed = guess_candidate_ids(anchors);
    c.expect(guessed.ok(), "trial " + std::to_string(trial) + ": guess failed");
    if (!guessed) continue;
    const std::set<MessageId> cand(guessed->begin(), guessed->end());
    const bool all = std::all_of(ids.begin() + 1, ids.end() - 1,
                                 [&](const MessageId& m) { return cand.contains(m); });
    c.expect(all, "trial " + std::to_string(trial) + ": interior id missing");
    covered += all;
    const std::uint64_t c0 = anchors.first.counter, c1 = anchors.second.counter;
    const std::uint64_t expected = (anchors.tau() + 1) * ((c1 - c0) / 100 - 1);
    const bool size_ok = guessed->size() == expected && cand.size() == guessed->size();
    c.expect(size_ok, "trial " + std::to_string(trial) + ": " + std::to_string(guessed->size()) +
                          " candidates, want " + std::to_string(expected));
    sized += size_ok;
    nonempty_formula += expected > 0;
  }
  std::ostringstream os;
  os << covered << "/" << kGuessTrials << " trials cover all interior ids, " << sized << "/"
     << kGuessTrials << " match (tau+1)((c1-c0)/100-1)";
  c.expect(nonempty_formula > kGuessTrials / 2, "too few trials with interior ids");
  return os.str();
}

// --- 8 ------------------------------------------------------------------

std::string counter_arithmetic(Check& c) {
  Bootstrap b;
  b.users = {{"U1", "alice", {}}, {"U2", "bob", {}}};
  b.channels = {{"north", ChannelKind::public_channel, {"alice", "bob"}},
                {"south", ChannelKind::public_channel, {"alice", "bob"}}};
  auto made = Platform::from_bootstrap(b, PolicyProfile::baseline(PlatformKind::slack), 7, {});
  c.expect(made.ok(), "platform setup failed");
  if (!made) return "setup failed";
  Platform& p = **made;
  Manifest m;
  m.name = "Poster";
  m.bot_scopes = {"chat:write"};
  auto app = p.install_app(m, UserId("U1"));
  c.expect(app.ok(), "app install failed");
  if (!app) return "setup failed";
  const std::map<std::string, ChannelId> chans = {
      {"north", p.workspace().channel_by_name("north")->id},
      {"south", p.workspace().channel_by_name("south")->id}};
  for (const auto& [n, id] : chans) p.workspace().add_bot(id, *app);
  const GrantId bot = *p.bot_grant(*app);

  // Table rows: consecutive deltas per action kind.
  std::map<CounterOracle::Act, std::set<std::uint32_t>> deltas;
  CounterOracle oracle;
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<int> pick_channel(0, 1), pick_act(0, 3), small_gap(0, 120);
  std::map<std::string, std::uint32_t> last_value;
  std::map<std::string, bool> has_value;
  int matched = 0, resets = 0, boundary_holds = 0;
  for (int step = 0; step < kCounterSteps; ++step) {
    SimTime gap = static_cast<SimTime>(small_gap(rng));
    if (step == 12 || step == 31) gap = kCounterResetWindow;       // exactly five days
    if (step == 20 || step == 40) gap = kCounterResetWindow + 1;   // one second more
    p.tick(p.now() + gap);
    const std::string ch = pick_channel(rng) ? "north" : "south";
    const auto act = static_cast<CounterOracle::Act>(pick_act(rng));
    const std::uint32_t want = oracle.step(ch, act, p.now());
    const ChannelId id = chans.at(ch);
    bool ran = true;
    switch (act) {
      case CounterOracle::Act::user_text:
        ran = p.user_post(UserId("U2"), PostTarget{id}, "step " + std::to_string(step)).ok();
        break;
      case CounterOracle::Act::app_text:
        ran = p.post_message(bot, PostTarget{id}, "app step " + std::to_string(step)).ok();
        break;
      case CounterOracle::Act::file_only:
        ran = p.user_upload(UserId("U1"), id, "f.txt", "file " + std::to_string(step)).ok();
        break;
      case CounterOracle::Act::draft_save:
        ran = p.user_save_draft(UserId("U1"), id).ok();
        break;
    }
    c.expect(ran, "step " + std::to_string(step) + " action failed");
    const auto channel = p.workspace().find_channel(id);
    const std::uint32_t got = channel->counter.value();
    c.expect(got == want, "step " + std::to_string(step) + ": counter " + std::to_string(got) +
                              ", oracle " + std::to_string(want));
    matched += got == want;
    if (act != CounterOracle::Act::draft_save) {
      const auto latest = p.workspace().latest_message_id(id);
      c.expect(latest && latest->counter == want && latest->timestamp_s == p.now(),
               "step " + std::to_string(step) + ": message id does not carry the counter");
    }
    if (has_value[ch] && want != 0) deltas[act].insert(want - last_value[ch]);
    if (gap == kCounterResetWindow + 1) resets += want == 0;
    if (gap == kCounterResetWindow && has_value[ch]) boundary_holds += want != 0;
    last_value[ch] = want;
    has_value[ch] = true;
  }
  c.expect(deltas[CounterOracle::Act::user_text] == std::set<std::uint32_t>{200}, "user text delta");
  for (auto a : {CounterOracle::Act::app_text, CounterOracle::Act::file_only,
                 CounterOracle::Act::draft_save}) {
    c.expect(deltas[a] == std::set<std::uint32_t>{100}, "100-step delta");
  }
  c.expect(resets == 2, "resets after five days plus one second: " + std::to_string(resets));
  c.expect(boundary_holds >= 1, "no exact five-day gap observed on an active channel");

  // Channel independence: replaying only one channel's actions yields the same ids.
  Workspace solo("solo", 1);
  solo.add_user(UserId("U1"), "alice");
  const ChannelId a = solo.add_channel("a", ChannelKind::public_channel, {UserId("U1")});
  const ChannelId b2 = solo.add_channel("b", ChannelKind::public_channel, {UserId("U1")});
  Workspace mixed = solo;
  std::vector<MessageId> only, interleaved;
  for (int i = 0; i < 20; ++i) {
    only.push_back(solo.next_message_id(a, PostAction::user_text, 100 + i));
    interleaved.push_back(mixed.next_message_id(a, PostAction::user_text, 100 + i));
    for (int k = 0; k < i % 3; ++k) mixed.next_message_id(b2, PostAction::app_text, 100 + i);
  }
  c.expect(only == interleaved, "channel a depends on channel b activity");

  std::ostringstream os;
  os << matched << "/" << kCounterSteps << " steps match the oracle; deltas 200/100/100/100; "
     << resets << " resets at 432001 s, none at 432000 s; channels independent";
  return os.str();
}

// --- 9 ------------------------------------------------------------------

bool pct_is(double got, double want) { return std::abs(got - want) < kPercentEps; }

std::string manifest_audit(Check& c) {
  const Corpus corpus = load_corpus(fixture("directory_2021"));
  c.expect(corpus.rejects.empty(), "fixture has rejected lines");
  const AuditReport r = audit(corpus.manifests());
  c.expect(r.slack_total == 2460 && r.teams_total == 1304, "fixture totals");
  c.expect(r.capable_delegation.count == 563, "writers " + std::to_string(r.capable_delegation.count));
  c.expect(r.vulnerable_slack.count == 1493, "readers " + std::to_string(r.vulnerable_slack.count));
  c.expect(r.command_users.count == 1266, "command users " + std::to_string(r.command_users.count));
  c.expect(r.vulnerable_teams.count == 427, "bot-commands " + std::to_string(r.vulnerable_teams.count));
  c.expect(r.domain_users.count == 77, "messageHandlers " + std::to_string(r.domain_users.count));
  c.expect(std::lround(r.capable_delegation.percent) == 23, "23%");
  c.expect(std::lround(r.vulnerable_slack.percent) == 61, "61%");
  c.expect(pct_is(r.command_users.percent, 51.5), "51.5%");
  c.expect(std::lround(r.vulnerable_teams.percent) == 33, "33%");
  c.expect(pct_is(r.domain_users.percent, 5.9), "5.9%");
  c.expect(r.command_conflicts == 270, "command conflicts " + std::to_string(r.command_conflicts));
  c.expect(r.domain_conflicts == 13, "domain conflicts " + std::to_string(r.domain_conflicts));
  c.expect(r.without_groups_history.count == 1640, "without groups:history");
  c.expect(r.extraction_capable == 11, "extraction capable " + std::to_string(r.extraction_capable));

  const auto raw = raw_manifests(fixture("desk"));
  const RecountTotals o = brute_force_recount(raw);
  const AuditReport d = audit(load_corpus(fixture("desk")).manifests());
  const bool desk = raw.size() == 10 && d.total == 10 && d.slack_total == o.slack &&
                    d.teams_total == o.teams && d.capable_delegation.count == o.writers &&
                    d.vulnerable_slack.count == o.readers &&
                    d.command_users.count == o.command_users &&
                    d.command_conflicts == o.command_conflicts &&
                    d.vulnerable_teams.count == o.bot_commands &&
                    d.domain_users.count == o.domain_users &&
                    d.domain_conflicts == o.domain_conflicts &&
                    d.without_groups_history.count == o.without_groups_history &&
                    d.extraction_capable == o.extraction_capable;
  c.expect(desk, "desk fixture differs from the brute-force recount");

  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << "slack " << r.capable_delegation.percent << "/" << r.vulnerable_slack.percent << "/"
     << r.command_users.percent << "%, teams " << r.vulnerable_teams.percent << "/"
     << r.domain_users.percent << "%, conflicts " << r.command_conflicts << "/"
     << r.domain_conflicts << ", extraction " << r.extraction_capable << "; desk "
     << (desk ? "matches" : "differs from") << " recount";
  return os.str();
}

// --- 10 -----------------------------------------------------------------

bool escalating_read(const MediationTrace& t) {
  return t.allow && t.escalation_prone && t.is_read() && t.crosses_provenance();
}

std::string complete_mediation(Check& c) {
  std::size_t runs = 0, traces = 0, bad = 0;
  for (auto platform : {PlatformKind::slack, PlatformKind::teams}) {
    for (auto mode : {CollisionMode::reject, CollisionMode::prompt, CollisionMode::alias}) {
      const PolicyProfile all = PolicyProfile::all_countermeasures(platform, mode);
      for (const auto& info : builtin_scenarios()) {
        if (!info.supports(platform)) continue;
        std::vector<std::string> variants;
        for (const auto& v : info.variants) {
          if (info.variant_supported(v, platform)) variants.push_back(v);
        }
        if (variants.empty()) variants.push_back("");
        for (const auto& v : variants) {
          auto r = run(info.name, all, v);
          ++runs;
          for (const auto& t : r.sim->platform->traces()) {
            ++traces;
            if (escalating_read(t)) {
              ++bad;
              c.expect(false, info.name + " " + v + ": escalation-prone read " + t.label);
            }
          }
        }
      }
    }
  }
  auto base = run("unfurl_extraction", profile_of(PlatformKind::slack));
  std::size_t explained = 0;
  for (const auto& l : base.report.leaked) {
    const AttachmentOrigin want = MessageOrigin{l.channel, l.message};
    const bool found = std::any_of(base.sim->platform->traces().begin(),
                                   base.sim->platform->traces().end(), [&](const MediationTrace& t) {
                                     return escalating_read(t) && t.provenance_crossed == want;
                                   });
    explained += found;
  }
  c.expect(!base.report.leaked.empty(), "baseline extraction leaked nothing");
  c.expect(explained == base.report.leaked.size(),
           std::to_string(base.report.leaked.size() - explained) + " leaks without a crossing trace");
  std::ostringstream os;
  os << bad << " escalation-prone crossing reads in " << traces << " traces over " << runs
     << " all-countermeasure runs; baseline " << explained << "/" << base.report.leaked.size()
     << " leaks have one";
  return os.str();
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Criterion>> criteria = {
      {"delegation suite", delegation_suite},
      {"post-removal residuals", post_removal},
      {"command hijack", command_hijack},
      {"unfurl hijack", unfurl_hijack},
      {"extraction via link unfurls", unfurl_extraction},
      {"extraction via pins/stars/reactions", pin_extraction},
      {"guess completeness", guess_completeness},
      {"counter arithmetic", counter_arithmetic},
      {"manifest audit", manifest_audit},
      {"complete mediation", complete_mediation},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    std::string detail;
    const auto start = std::chrono::steady_clock::now();
    try {
      detail = criteria[i].second(check);
    } catch (const std::exception& e) {
      check.expect(false, std::string("exception: ") + e.what());
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.expect(secs < kMaxSecondsPerCriterion, "took " + std::to_string(secs) + " s");
    std::printf("[%s] %zu %s: %s (%.2f s)\n", check.ok ? "PASS" : "FAIL", i + 1,
                criteria[i].first.c_str(), detail.c_str(), secs);
    for (const auto& f : check.failures) std::printf("       - %s\n", f.c_str());
    failed += check.ok ? 0 : 1;
  }
  std::fflush(stdout);
  return failed;
}
