#include <algorithm>
#include <deque>
#include <map>
#include <random>

#include "bcpsim/attacks/guess.hpp"
#include "bcpsim/core/url.hpp"
#include "builtin.hpp"

namespace bcpsim::scenario_detail {

namespace {

constexpr SimTime kWindow = 300;
constexpr std::size_t kWindowMessages = 30;
constexpr SimTime kTauStart = 10;
constexpr SimTime kTauMax = 60;
constexpr std::uint32_t kGapHigh = 500;
constexpr std::uint32_t kGapLow = 200;
constexpr SimTime kGiveUpAfter = 20000;

const char* kPhrases[] = {
    "move the launch to the 14th",
    "legal wants the NDA redlines by Friday",
    "budget for Q3 is capped at 1.2M",
    "acquisition target shortlist: Nimbus, Orla, Teka",
    "board deck draft is in the shared drive",
    "do not mention the layoffs before the all-hands",
    "pricing goes up 8% in October",
    "vendor audit found two open findings",
};

// The channel members' own activity during the window: user posts, bot
// digests, file uploads, and the odd draft save.
void schedule_history(Platform& p, const ChannelId& channel, SimTime start, std::uint64_t seed) {
  const Channel* ch = p.workspace().find_channel(channel);
  std::vector<UserId> members(ch->users.begin(), ch->users.end());
  std::optional<GrantId> bot;
  for (const auto& app : ch->bots) {
    if (auto g = p.bot_grant(app)) {
      bot = g;
      break;
    }
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<SimTime> offsets;
  for (std::size_t i = 0; i < kWindowMessages; ++i) offsets.push_back(1 + rng() % kWindow);
  std::sort(offsets.begin(), offsets.end());

  for (std::size_t i = 0; i < kWindowMessages; ++i) {
    const UserId author = members[i % members.size()];
    const std::string text = "item " + std::to_string(i + 1) + ": " + kPhrases[rng() % 8];
    const SimTime at = start + offsets[i];
    if (i % 8 == 7) {
      p.at(at, [author, channel](Platform& pl) { (void)pl.user_save_draft(author, channel); });
    }
    if (bot && i % 5 == 4) {
      const GrantId g = *bot;
      p.at(at, [g, channel, text](Platform& pl) {
        (void)pl.post_message(g, channel, "standup digest, " + text);
      });
    } else if (i % 6 == 2) {
      const std::string name = "notes-" + std::to_string(i + 1) + ".txt";
      p.at(at, [author, channel, name, text](Platform& pl) {
        (void)pl.user_upload(author, channel, name, "attachment for " + text);
      });
    } else {
      p.at(at, [author, channel, text](Platform& pl) { (void)pl.user_post(author, channel, text); });
    }
  }
}

// Polls the target channel's latest id and turns each pair of consecutive
// anchors into the ids that can lie between them.
class AnchorTracker {
 public:
  AnchorTracker(Platform& p, GrantId token, ChannelId channel, bool fallback)
      : p_(p), token_(token), channel_(std::move(channel)), fallback_(fallback) {}

  bool due(SimTime now) const { return !started_ || now >= next_; }
  SimTime tau() const { return tau_; }
  std::size_t polls() const { return polls_; }

  Result<std::vector<MessageId>> poll() {
    auto latest = query();
    if (!latest) return latest.error();
    const SimTime now = p_.now();
    ++polls_;
    std::vector<MessageId> out;
    if (!started_) {
      started_ = true;
      prev_ = *latest;
      prev_query_ = now;
      next_ = now + tau_;
      return out;
    }
    std::uint32_t gap = 0;
    if (*latest && *latest != prev_) {
      const MessageId b = **latest;
      std::vector<MessageId> cands;
      auto guessed = prev_ ? guess_candidate_ids({*prev_, b}) : Result<std::vector<MessageId>>(
                                                                    make_error(Errc::invalid_anchors));
      if (guessed) {
        cands = std::move(guessed).value();
        gap = b.counter - prev_->counter;
      } else {
        // Counter restarted (or the channel was empty): scan from zero.
        for (SimTime t = prev_query_; t <= b.timestamp_s; ++t) {
          for (std::uint32_t c = 0; c < b.counter; c += MessageId::kCounterStep) {
            cands.push_back({t, c});
          }
        }
        gap = b.counter + MessageId::kCounterStep;
      }
      // Anything between the anchors was posted after the previous query.
      for (const auto& id : cands) {
        if (id.timestamp_s >= prev_query_) out.push_back(id);
      }
      out.push_back(b);
      prev_ = b;
    }
    if (gap > kGapHigh) {
      tau_ = std::max<SimTime>(1, tau_ / 2);
    } else if (gap < kGapLow) {
      tau_ = std::min(kTauMax, tau_ * 2);
    }
    prev_query_ = now;
    next_ = now + tau_;
    return out;
  }

 private:
  Result<std::optional<MessageId>> query() {
    auto meta = p_.read_channel_metadata(token_, channel_);
    if (meta) return meta->latest;
    if (!fallback_) return meta.error();
    // Post and delete a throwaway message; its id is the anchor.
    auto pm = p_.post_message(token_, channel_, ".");
    if (!pm) return pm.error();
    (void)p_.delete_message(token_, pm->channel, pm->id);
    return std::optional<MessageId>(pm->id);
  }

  Platform& p_;
  GrantId token_;
  ChannelId channel_;
  bool fallback_;
  bool started_ = false;
  std::optional<MessageId> prev_;
  SimTime prev_query_ = 0;
  SimTime next_ = 0;
  SimTime tau_ = kTauStart;
  std::size_t polls_ = 0;
};

struct ExtractionSetup {
  UserId victim;
  ChannelId target;
  ChannelId personal;
  AppId attacker;
  GrantId token;
  std::optional<MessageId> baseline;  // latest id before the window
  SimTime started = 0;
  SimTime window_end = 0;
};

ScopeSet metadata_scopes(const ScenarioOptions& o) {
  const Bootstrap& b = bootstrap_of(o);
  for (const auto& c : b.channels) {
    if (c.name != o.target_channel) continue;
    if (c.kind == ChannelKind::private_channel) return {Scope::groups_read};
    if (c.kind == ChannelKind::public_channel) return {Scope::channels_history};
  }
  return {};
}

// Installs the attacker app, obtains the delegated grant, and schedules
// the window's history. Returns nullopt (with the report filled) when the
// attack cannot start.
Result<std::optional<ExtractionSetup>> setup_extraction(ScenarioRun& run, const ScenarioOptions& o,
                                                        const ScopeSet& grant,
                                                        const std::string& app_name) {
  Platform& p = *run.sim->platform;
  AttackReport& r = run.report;
  ExtractionSetup s;
  s.started = p.now();
  auto victim = user_named(p, o.victim);
  if (!victim) return victim.error();
  auto target = channel_named(p, o.target_channel);
  if (!target) return target.error();
  s.victim = *victim;
  s.target = *target;
  s.personal = p.workspace().find_user(s.victim)->personal_channel;
  s.baseline = p.workspace().latest_message_id(s.target);
  s.window_end = s.started + kWindow;
  schedule_history(p, s.target, s.started, o.seed);

  r.grant_kind = "user_delegate";
  r.grant_scopes = grant;
  Manifest m;
  m.name = app_name;
  m.platform = o.profile.platform;
  m.user_scopes = scope_names(grant);
  auto attacker = p.install_app(m, s.victim);
  if (!attacker) {
    block_on(r, attacker.error(), "install attacker app");
    p.tick(s.window_end);
    return std::optional<ExtractionSetup>{};
  }
  s.attacker = *attacker;
  auto token = p.authorize_user_delegation(s.attacker, s.victim, grant);
  if (!token) {
    block_on(r, token.error(), "delegated authorization");
    p.tick(s.window_end);
    return std::optional<ExtractionSetup>{};
  }
  s.token = *token;
  return std::optional<ExtractionSetup>{s};
}

// Ground truth: every message that appeared in the target during the run.
std::map<MessageId, std::string> window_truth(const Platform& p, const ExtractionSetup& s) {
  std::map<MessageId, std::string> truth;
  for (const Message* m : p.workspace().history(s.target)) {
    if (!s.baseline || m->id > *s.baseline) truth[m->id] = m->text;
  }
  return truth;
}

void judge_leaks(AttackReport& r, const Platform& p, const ExtractionSetup& s,
                 const std::map<MessageId, LeakedMessage>& leaked, const std::string& method) {
  const auto truth = window_truth(p, s);
  r.expected_leaks = truth.size();
  std::size_t exact = 0;
  for (auto [id, l] : leaked) {
    auto it = truth.find(id);
    l.matches_truth =
        it != truth.end() && l.content == it->second.substr(0, kMaxAttachmentChars) &&
        l.truncated == (it->second.size() > kMaxAttachmentChars);
    exact += l.matches_truth ? 1 : 0;
    r.leaked.push_back(l);
  }
  if (!truth.empty() && exact == truth.size()) {
    r.verdict = Verdict::succeeded;
    return;
  }
  r.verdict = Verdict::blocked;
  if (!leaked.empty()) {
    r.justifications.push_back("partial leak: " + std::to_string(exact) + "/" +
                               std::to_string(truth.size()) + " messages recovered via " + method);
  } else if (r.justifications.empty()) {
    r.justifications.push_back("no message content recovered via " + method);
  }
}

}  // namespace

ScopeSet unfurl_extraction_prerequisites(const ScenarioOptions& o) {
  ScopeSet s = metadata_scopes(o);
  s.insert(delegated_post_scope(o.profile));
  s.insert(Scope::im_history);
  return s;
}

ScopeSet pin_extraction_prerequisites(const ScenarioOptions& o) {
  ScopeSet s = metadata_scopes(o);
  if (o.variant == "star") {
    s.insert({Scope::stars_read, Scope::stars_write});
  } else if (o.variant == "reaction") {
    s.insert({Scope::reactions_read, Scope::reactions_write});
  } else {
    s.insert({Scope::pins_read, Scope::pins_write});
  }
  return s;
}

Result<ScenarioRun> run_unfurl_extraction(const ScenarioOptions& o) {
  auto made = make_sim(o);
  if (!made) return made.error();
  ScenarioRun run = start_run(o, "unfurl_extraction", std::move(made).value());
  Platform& p = *run.sim->platform;
  AttackReport& r = run.report;

  auto setup = setup_extraction(run, o, grant_for(o, unfurl_extraction_prerequisites(o)),
                                "Notes Helper");
  if (!setup) return setup.error();
  if (!*setup) {
    r.verdict = Verdict::blocked;
    finish_report(r, p, {}, p.now() - kWindow);
    return run;
  }
  const ExtractionSetup s = **setup;
  const std::string ws = p.workspace().name();

  AnchorTracker tracker(p, s.token, s.target, o.anchor_fallback);
  std::deque<std::string> queue;
  std::set<MessageId> queued;
  std::vector<PostedMessage> carriers;
  bool stopped = false;
  bool final_poll = false;
  std::size_t candidates = 0;

  auto post_batch = [&]() {
    if (queue.empty() || stopped) return;
    std::string text;
    for (std::size_t n = 0; n < kUnfurlsPerSecond && !queue.empty(); ++n) {
      if (!text.empty()) text += " ";
      text += queue.front();
      queue.pop_front();
    }
    auto pm = p.post_message(s.token, s.victim, text);
    if (!pm) {
      block_on(r, pm.error(), "post carrier message to the user's own channel");
      stopped = true;
      return;
    }
    carriers.push_back(*pm);
  };

  auto poll = [&]() {
    auto ids = tracker.poll();
    if (!ids) {
      block_on(r, ids.error(), "read latest id of " + o.target_channel);
      stopped = true;
      return;
    }
    for (const auto& id : *ids) {
      if (queued.insert(id).second) {
        queue.push_back(format_message_url(ws, s.target, id));
        ++candidates;
      }
    }
  };

  poll();
  while (!stopped) {
    p.tick(p.now() + 1);
    const SimTime now = p.now();
    if (now > s.window_end && !final_poll) {
      poll();
      final_poll = true;
    } else if (!final_poll && tracker.due(now)) {
      poll();
    }
    post_batch();
    if (final_poll && queue.empty() && p.pending_unfurls() == 0) break;
    if (now > s.started + kGiveUpAfter) {
      r.notes.push_back("gave up with " + std::to_string(queue.size()) + " URLs unsent");
      break;
    }
  }

  std::map<MessageId, LeakedMessage> leaked;
  std::set<std::string> downloads;
  auto harvest = [&]() {
    auto hist = p.read_history(s.token, s.personal);
    if (!hist) {
      block_on(r, hist.error(), "read the user's own channel");
      return;
    }
    const Principal self = DelegatedPrincipal{s.attacker, s.victim};
    for (const auto& m : *hist) {
      if (m.issuer != self) continue;
      for (const auto& a : m.attachments) {
        if (const auto* mo = std::get_if<MessageOrigin>(&a.origin)) {
          if (mo->channel == s.target && !leaked.contains(mo->message)) {
            leaked[mo->message] = {mo->channel, mo->message, a.content, a.truncated, false};
          }
        } else if (std::holds_alternative<FileOrigin>(a.origin)) {
          downloads.insert(a.content);
        }
      }
    }
  };
  if (!carriers.empty()) harvest();

  // Second pass: file links found in leaked messages unfurl to downloads.
  std::vector<std::string> file_urls;
  for (const auto& [id, l] : leaked) {
    for (const auto& url : extract_urls(l.content)) {
      auto t = classify_url(url);
      if (t && std::holds_alternative<FileUrl>(*t)) file_urls.push_back(url);
    }
  }
  if (!file_urls.empty() && !stopped) {
    for (auto& u : file_urls) queue.push_back(u);
    while (!queue.empty() && !stopped) {
      post_batch();
      p.tick(p.now() + 1);
    }
    while (p.pending_unfurls() > 0) p.tick(p.now() + 1);
    harvest();
  }

  for (const auto& c : carriers) (void)p.delete_message(s.token, c.channel, c.id);
  bool clean = true;
  for (const auto& c : carriers) {
    const Message* m = p.workspace().find_message(c.channel, c.id);
    clean = clean && (!m || m->deleted);
  }
  r.stealthy = clean;
  r.download_refs.assign(downloads.begin(), downloads.end());
  r.notes.push_back(std::to_string(tracker.polls()) + " anchor polls, " +
                    std::to_string(candidates) + " candidate URLs, " +
                    std::to_string(carriers.size()) + " carrier messages");
  if (!file_urls.empty()) {
    r.notes.push_back(std::to_string(file_urls.size()) + " file links re-unfurled, " +
                      std::to_string(downloads.size()) + " download references");
  }

  judge_leaks(r, p, s, leaked, "message-link previews");
  if (r.verdict == Verdict::blocked) {
    add_denial_justifications(r, denials_of(p, s.attacker), "during extraction");
  }
  finish_report(r, p, s.attacker, s.started);
  return run;
}

Result<ScenarioRun> run_pin_extraction(const ScenarioOptions& o) {
  auto made = make_sim(o);
  if (!made) return made.error();
  ScenarioRun run = start_run(o, "pin_extraction", std::move(made).value());
  Platform& p = *run.sim->platform;
  AttackReport& r = run.report;

  const SavedKind kind = o.variant == "star"       ? SavedKind::star
                         : o.variant == "reaction" ? SavedKind::reaction
                                                   : SavedKind::pin;
  const std::string emoji = kind == SavedKind::reaction ? "eyes" : "";
  auto setup =
      setup_extraction(run, o, grant_for(o, pin_extraction_prerequisites(o)), "Focus Timer");
  if (!setup) return setup.error();
  if (!*setup) {
    r.verdict = Verdict::blocked;
    finish_report(r, p, {}, p.now() - kWindow);
    return run;
  }
  const ExtractionSetup s = **setup;

  auto owned_by_victim = [&]() {
    std::vector<SavedItem> out;
    for (const auto& item : p.workspace().saved_items()) {
      if (item.owner == s.victim) out.push_back(item);
    }
    return out;
  };
  const auto before = owned_by_victim();

  AnchorTracker tracker(p, s.token, s.target, o.anchor_fallback);
  std::map<MessageId, LeakedMessage> leaked;
  bool stopped = false;
  bool final_poll = false;
  std::size_t tried = 0;
  std::size_t valid = 0;

  auto probe = [&]() {
    auto ids = tracker.poll();
    if (!ids) {
      block_on(r, ids.error(), "read latest id of " + o.target_channel);
      stopped = true;
      return;
    }
    std::vector<MessageId> added;
    for (const auto& id : *ids) {
      if (leaked.contains(id)) continue;
      ++tried;
      auto st = p.add_saved(s.token, kind, s.target, id, emoji);
      if (st) {
        added.push_back(id);
      } else if (!st.is(Errc::unknown_message)) {
        block_on(r, st.error(), "add " + std::string(to_string(kind)));
        stopped = true;
        return;
      }
    }
    if (added.empty()) return;
    valid += added.size();
    auto list = p.list_saved(s.token, kind);
    if (!list) {
      block_on(r, list.error(), "list " + std::string(to_string(kind)) + "s");
      stopped = true;
    } else {
      for (const auto& e : *list) {
        if (e.channel != s.target || !e.content) continue;
        if (std::find(added.begin(), added.end(), e.message) == added.end()) continue;
        leaked[e.message] = {e.channel, e.message, *e.content, false, false};
      }
    }
    for (const auto& id : added) (void)p.remove_saved(s.token, kind, s.target, id, emoji);
  };

  probe();
  while (!stopped && !final_poll) {
    p.tick(p.now() + 1);
    const SimTime now = p.now();
    if (now > s.window_end) {
      probe();
      final_poll = true;
    } else if (tracker.due(now)) {
      probe();
    }
  }

  r.stealthy = owned_by_victim() == before;
  r.notes.push_back(std::to_string(tracker.polls()) + " anchor polls, " + std::to_string(tried) +
                    " guesses, " + std::to_string(valid) + " valid");
  judge_leaks(r, p, s, leaked, std::string(to_string(kind)) + " listing");
  if (r.verdict == Verdict::blocked) {
    add_denial_justifications(r, denials_of(p, s.attacker), "during extraction");
  }
  finish_report(r, p, s.attacker, s.started);
  return run;
}

}  // namespace bcpsim::scenario_detail
