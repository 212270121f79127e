#include <doctest.h>

#include "../support.hpp"
#include "bcpsim/platform/platform.hpp"

using namespace bcpsim;
using namespace bcpsim::test;

namespace {

struct Desk {
  std::unique_ptr<Sim> sim;
  Platform* p = nullptr;
  UserId alice, bob;
  ChannelId general, secret;

  explicit Desk(PolicyProfile profile) {
    ScenarioOptions o;
    o.profile = std::move(profile);
    auto made = make_sim(o);
    REQUIRE(made.ok());
    sim = std::move(made).value();
    p = sim->platform.get();
    alice = p->workspace().user_by_name("alice")->id;
    bob = p->workspace().user_by_name("bob")->id;
    general = p->workspace().channel_by_name("general")->id;
    secret = p->workspace().channel_by_name("secret-plans")->id;
  }

  AppId install(const std::string& name, std::vector<std::string> bot,
                std::vector<std::string> user = {}) {
    Manifest m;
    m.name = name;
    m.platform = p->profile().platform;
    m.bot_scopes = std::move(bot);
    m.user_scopes = std::move(user);
    auto id = p->install_app(m, alice);
    REQUIRE(id.ok());
    return *id;
  }
};

}  // namespace

TEST_CASE("every allow trace replays against the snapshot it was taken on") {
  Desk d(PolicyProfile::baseline(PlatformKind::slack));
  const AppId app = d.install("Reader", {"chat:write", "channels:history", "groups:history"},
                              {"chat:write", "groups:read", "im:history", "pins:read", "pins:write"});
  d.p->workspace().add_bot(d.general, app);
  auto delegate = d.p->authorize_user_delegation(app, d.alice);
  REQUIRE(delegate.ok());
  const GrantId bot = *d.p->bot_grant(app);

  std::size_t allows = 0, denies = 0;
  auto check_last = [&] {
    const MediationTrace& t = d.p->traces().back();
    if (!t.allow) {
      ++denies;
      CHECK(t.denial.has_value());
      return;
    }
    ++allows;
    const TokenGrant* g = d.p->grant(t.grant);
    REQUIRE(g != nullptr);
    CHECK(d.p->engine().replay(t, *g, d.p->world()));
  };
  auto posted = d.p->post_message(bot, PostTarget{d.general}, "hello");
  check_last();
  (void)d.p->read_history(bot, d.general);
  check_last();
  (void)d.p->read_history(bot, d.secret);  // not a member
  check_last();
  (void)d.p->post_message(*delegate, PostTarget{d.secret}, "as alice");
  check_last();
  (void)d.p->read_channel_metadata(*delegate, d.secret);
  check_last();
  (void)d.p->read_history(*delegate, d.secret);  // no groups:history on the delegate
  check_last();
  REQUIRE(posted.ok());
  (void)d.p->add_saved(*delegate, SavedKind::pin, d.general, posted->id);
  check_last();
  (void)d.p->list_saved(*delegate, SavedKind::pin);
  check_last();
  CHECK(allows >= 5);
  CHECK(denies >= 2);
}

TEST_CASE("removing a granted scope flips Level 1 for the accesses that used it") {
  for (const char* variant : {"pin", "star", "reaction"}) {
    auto r = run("pin_extraction", PolicyProfile::baseline(PlatformKind::slack), variant);
    const Platform& p = *r.sim->platform;
    std::set<Scope> used;
    for (const auto& t : p.traces()) {
      if (!t.allow || !t.scope) continue;
      const TokenGrant* g = p.grant(t.grant);
      REQUIRE(g != nullptr);
      if (!r.report.grant_scopes.contains(*t.scope) || g->kind == TokenKind::bot) continue;
      used.insert(*t.scope);
      TokenGrant without = *g;
      without.scopes.erase(*t.scope);
      const MediationTrace again = p.engine().check(without, t.op, t.resource, p.world());
      CHECK_FALSE(again.level1_pass);
      CHECK_FALSE(again.allow);
    }
    // No phantom scopes: every granted scope was needed by some access.
    CHECK(used == r.report.grant_scopes);
  }
}

TEST_CASE("under full revocation every later check for the app is a deny") {
  Desk d(profile_of(PlatformKind::slack, {"C6"}));
  const AppId app = d.install("Leaver", {"chat:write", "channels:history"}, {"chat:write"});
  d.p->workspace().add_bot(d.general, app);
  auto delegate = d.p->authorize_user_delegation(app, d.alice);
  REQUIRE(delegate.ok());
  const GrantId bot = *d.p->bot_grant(app);
  auto sched = d.p->schedule_message(*delegate, PostTarget{d.general}, "later", d.p->now() + 30);
  REQUIRE(sched.ok());

  auto removal = d.p->uninstall_app(app);
  REQUIRE(removal.ok());
  CHECK(removal->residual_count() == 0);
  const std::size_t mark = d.p->traces().size();

  for (GrantId g : {bot, *delegate}) {
    CHECK(d.p->post_message(g, PostTarget{d.general}, "x").denied_for(DenialReason::revoked));
    CHECK(d.p->read_history(g, d.general).denied_for(DenialReason::revoked));
    CHECK(d.p->read_channel_metadata(g, d.general).denied_for(DenialReason::revoked));
    CHECK_FALSE(d.p->schedule_message(g, PostTarget{d.general}, "y", d.p->now() + 5).ok());
  }
  d.p->tick(d.p->now() + 60);
  for (const auto& s : d.p->scheduled()) CHECK_FALSE(s.fired);
  std::size_t firing = 0;
  for (std::size_t i = mark; i < d.p->traces().size(); ++i) {
    const auto& t = d.p->traces()[i];
    CHECK_FALSE(t.allow);
    firing += t.op == Operation::fire_scheduled;
  }
  CHECK(firing >= 1);
}

TEST_CASE("baseline uninstall leaves residual access") {
  Desk d(PolicyProfile::baseline(PlatformKind::slack));
  const AppId app = d.install("Leaver", {"chat:write"}, {"chat:write"});
  auto delegate = d.p->authorize_user_delegation(app, d.alice);
  REQUIRE(delegate.ok());
  REQUIRE(d.p->schedule_message(*delegate, PostTarget{d.general}, "later", d.p->now() + 30).ok());
  auto removal = d.p->uninstall_app(app);
  REQUIRE(removal.ok());
  CHECK(removal->residual_count() >= 1);
  d.p->tick(d.p->now() + 60);
  bool fired = false;
  for (const auto& s : d.p->scheduled()) fired |= s.fired;
  CHECK(fired);
}

TEST_CASE("event issuer exposure follows the profile") {
  for (bool c4 : {false, true}) {
    const PolicyProfile prof = c4 ? profile_of(PlatformKind::slack, {"C4"})
                                  : PolicyProfile::baseline(PlatformKind::slack);
    auto r = run("delegation", prof, "tweet_reactor");
    std::size_t messages = 0, reactions = 0;
    for (const auto& rec : r.sim->platform->events()) {
      const Event& e = rec.event;
      if (e.kind == EventKind::message_posted) {
        ++messages;
        CHECK(e.issuer.has_value());
      }
      if (e.kind == EventKind::reaction_added) {
        ++reactions;
        CHECK(e.issuer.has_value() == c4);
      }
    }
    CHECK(messages >= 1);
    CHECK(reactions >= 1);
  }
}

TEST_CASE("collision prompt denies by default and honors a scripted answer") {
  for (bool answer : {false, true}) {
    Desk d(profile_of(PlatformKind::slack, {"C5-Prompt"}));
    Manifest m;
    m.name = "Zoom Clone";
    m.bot_scopes = {"commands"};
    m.commands = {"/zoom"};
    auto id = d.p->install_app(m, d.p->workspace().user_by_name("carol")->id);
    REQUIRE(id.ok());
    if (answer) d.p->script_confirmation(d.alice, "/zoom", true);
    auto inv = d.p->invoke_command(d.alice, "/zoom", d.general);
    if (answer) {
      REQUIRE(inv.ok());
      CHECK(inv->app == *id);
    } else {
      CHECK(inv.denied_for(DenialReason::confirmation_required));
    }
  }
}

TEST_CASE("collision reject refuses the second registrant") {
  Desk d(profile_of(PlatformKind::slack, {"C5-Reject"}));
  Manifest m;
  m.name = "Zoom Clone";
  m.bot_scopes = {"commands"};
  m.commands = {"/zoom"};
  auto id = d.p->install_app(m, d.alice);
  CHECK(id.denied_for(DenialReason::collision_rejected));
}

TEST_CASE("finer posting scopes split app and human targets") {
  Desk d(profile_of(PlatformKind::slack, {"C1"}));
  const AppId app = d.install("Poster", {}, {"chat:write:human"});
  auto delegate = d.p->authorize_user_delegation(app, d.alice);
  REQUIRE(delegate.ok());
  CHECK(d.p->post_message(*delegate, PostTarget{d.alice}, "note to self").ok());
  const AppId mail = d.p->registry().app_by_name("MailClark")->id;
  CHECK(d.p->post_message(*delegate, PostTarget{mail}, "to the bot").denied_for(DenialReason::missing_scope));
  CHECK(d.p->traces().back().scope == Scope::chat_write_app);
}
