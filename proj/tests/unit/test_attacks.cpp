#include <doctest.h>

#include <fstream>

#include "../support.hpp"
#include "bcpsim/attacks/guess.hpp"
#include "bcpsim/attacks/scenario_file.hpp"
#include "bcpsim/platform/platform.hpp"

using namespace bcpsim;
using namespace bcpsim::test;

namespace {

struct Combo {
  const ScenarioInfo* info;
  PlatformKind platform;
  std::string variant;
};

std::vector<Combo> all_combos() {
  std::vector<Combo> out;
  for (const auto& info : builtin_scenarios()) {
    for (auto p : {PlatformKind::slack, PlatformKind::teams}) {
      if (!info.supports(p)) continue;
      if (info.variants.empty()) out.push_back({&info, p, ""});
      for (const auto& v : info.variants) {
        if (info.variant_supported(v, p)) out.push_back({&info, p, v});
      }
    }
  }
  return out;
}

std::string name_of(const Combo& c) {
  return c.info->name + "/" + std::string(to_string(c.platform)) + "/" + c.variant;
}

}  // namespace

TEST_CASE("guess candidates cover the rectangle between anchors") {
  auto none = guess_candidate_ids({{100, 500}, {103, 600}});
  REQUIRE(none.ok());
  CHECK(none->empty());
  auto one_row = guess_candidate_ids({{100, 500}, {102, 700}});
  REQUIRE(one_row.ok());
  CHECK(*one_row == std::vector<MessageId>{{100, 600}, {101, 600}, {102, 600}});
  CHECK(guess_candidate_ids({{100, 700}, {101, 500}}).is(Errc::invalid_anchors));
  CHECK(guess_candidate_ids({{101, 500}, {100, 700}}).is(Errc::invalid_anchors));
  CHECK(guess_candidate_ids({{100, 550}, {101, 700}}).is(Errc::invalid_anchors));
}

TEST_CASE("built-in scenario list") {
  const auto& all = builtin_scenarios();
  CHECK(all.size() == 8);
  for (const char* n : {"delegation", "file_trigger", "post_removal", "command_hijack_create",
                        "command_hijack_rename", "unfurl_hijack", "unfurl_extraction",
                        "pin_extraction"}) {
    CHECK(find_scenario(n) != nullptr);
  }
}

TEST_CASE("every baseline attack is minimal in its grant") {
  for (const auto& c : all_combos()) {
    CAPTURE(name_of(c));
    ScenarioOptions o;
    o.profile = PolicyProfile::baseline(c.platform);
    o.variant = c.variant;
    auto base = run_scenario(*c.info, o);
    REQUIRE(base.ok());
    if (c.info->name == "unfurl_hijack" && c.platform == PlatformKind::slack) {
      CHECK(base->report.verdict == Verdict::blocked);
      continue;
    }
    CHECK(base->report.verdict == Verdict::succeeded);
    CHECK(base->report.grant_scopes == c.info->prerequisites(o));
    CHECK(!base->report.grant_scopes.empty());
    auto m = scope_minimality(*c.info, o);
    REQUIRE(m.ok());
    CHECK(m->size() == base->report.grant_scopes.size());
    for (const auto& res : *m) {
      CAPTURE(scope_name(res.dropped));
      CHECK(res.report.verdict == Verdict::blocked);
      CHECK(res.report.denials.contains(DenialReason::missing_scope));
    }
  }
}

TEST_CASE("reports satisfy the evidence invariant under every profile") {
  for (const auto& c : all_combos()) {
    for (const char* cm : {"", "C1", "C2", "C3", "C4", "C5-Reject", "C5-Prompt", "C5-Alias", "C6",
                           "all"}) {
      CAPTURE(name_of(c));
      CAPTURE(cm);
      const PolicyProfile prof = *cm ? profile_of(c.platform, {cm}) : profile_of(c.platform);
      auto r = run(c.info->name, prof, c.variant);
      CHECK(r.report.validate().ok());
      if (r.report.verdict == Verdict::succeeded) CHECK(r.report.has_evidence());
      if (r.report.verdict == Verdict::blocked) CHECK(!r.report.justifications.empty());
      if (std::string(cm) == "all") CHECK(r.report.verdict == Verdict::blocked);
    }
  }
}

TEST_CASE("with the issuer check on, no effect comes from a delegated trigger") {
  for (const auto& c : all_combos()) {
    CAPTURE(name_of(c));
    auto r = run(c.info->name, profile_of(c.platform, {"C4"}), c.variant);
    for (const auto& e : r.sim->ledger.entries()) {
      const Event* ev = r.sim->platform->find_event(e.caused_by);
      REQUIRE(ev != nullptr);
      const bool delegated = ev->issuer && is_delegated(*ev->issuer);
      CHECK_FALSE(delegated);
    }
  }
}

TEST_CASE("reaction and pin extraction leak the same messages") {
  const auto prof = PolicyProfile::baseline(PlatformKind::slack);
  auto pin = run("pin_extraction", prof, "pin");
  auto reaction = run("pin_extraction", prof, "reaction");
  std::set<std::pair<MessageId, std::string>> a, b;
  for (const auto& l : pin.report.leaked) a.insert({l.message, l.content});
  for (const auto& l : reaction.report.leaked) b.insert({l.message, l.content});
  CHECK(a.size() == 30);
  CHECK(a == b);
}

TEST_CASE("delegation and pin extraction leave no trace behind") {
  for (const char* v : {"mail_bridge", "live_chat", "tweet_reactor", "file_indexer"}) {
    CAPTURE(v);
    auto r = run("delegation", PolicyProfile::baseline(PlatformKind::slack), v);
    REQUIRE(r.report.stealthy.has_value());
    CHECK(*r.report.stealthy);
    for (const auto& [id, ch] : r.sim->platform->workspace().channels()) {
      for (const Message* m : r.sim->platform->workspace().history(id)) {
        const auto app = issuing_app(m->issuer);
        CHECK_FALSE((app && is_delegated(m->issuer)));
      }
    }
  }
  for (const char* v : {"pin", "star", "reaction"}) {
    auto r = run("pin_extraction", PolicyProfile::baseline(PlatformKind::slack), v);
    CHECK(r.report.stealthy == true);
    CHECK(r.sim->platform->workspace().saved_items().empty());
  }
}

TEST_CASE("runs are deterministic in the seed") {
  for (const char* name : {"unfurl_extraction", "pin_extraction", "delegation"}) {
    CAPTURE(name);
    auto a = run(name, PolicyProfile::baseline(PlatformKind::slack), "", 9);
    auto b = run(name, PolicyProfile::baseline(PlatformKind::slack), "", 9);
    CHECK(to_json(a.report).dump() == to_json(b.report).dump());
    const auto& ta = a.sim->platform->traces();
    const auto& tb = b.sim->platform->traces();
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) CHECK(to_json(ta[i]).dump() == to_json(tb[i]).dump());
    auto c = run(name, PolicyProfile::baseline(PlatformKind::slack), "", 10);
    CHECK(c.report.verdict == a.report.verdict);
  }
  auto s1 = run("unfurl_extraction", PolicyProfile::baseline(PlatformKind::slack), "", 1);
  auto s2 = run("unfurl_extraction", PolicyProfile::baseline(PlatformKind::slack), "", 2);
  CHECK(to_json(s1.report).dump() != to_json(s2.report).dump());
  CHECK(s2.report.leaked.size() == 30);
}

TEST_CASE("extraction anchors by post and delete when metadata is off limits") {
  ScenarioOptions o;
  o.profile = PolicyProfile::baseline(PlatformKind::slack);
  o.grant = ScopeSet{Scope::chat_write, Scope::im_history};
  auto without = run_scenario(*find_scenario("unfurl_extraction"), o);
  REQUIRE(without.ok());
  CHECK(without->report.verdict == Verdict::blocked);
  CHECK(without->report.denials.contains(DenialReason::missing_scope));
  o.anchor_fallback = true;
  auto with = run_scenario(*find_scenario("unfurl_extraction"), o);
  REQUIRE(with.ok());
  CHECK(with->report.verdict == Verdict::succeeded);
  CHECK(with->report.leaked.size() == with->report.expected_leaks);
}

TEST_CASE("file links inside leaked messages yield download references") {
  auto r = run("unfurl_extraction", PolicyProfile::baseline(PlatformKind::slack));
  CHECK(!r.report.download_refs.empty());
  for (const auto& ref : r.report.download_refs) CHECK(ref.find("/download") != std::string::npos);
  auto c2 = run("unfurl_extraction", profile_of(PlatformKind::slack, {"C2"}));
  CHECK(c2.report.download_refs.empty());
}

TEST_CASE("unsupported platform or variant is a config error") {
  ScenarioOptions o;
  o.profile = PolicyProfile::baseline(PlatformKind::teams);
  CHECK_FALSE(run_scenario(*find_scenario("pin_extraction"), o).ok());
  o.profile = PolicyProfile::baseline(PlatformKind::slack);
  o.variant = "repo_bot";
  CHECK_FALSE(run_scenario(*find_scenario("delegation"), o).ok());
  o.variant = "nonsense";
  CHECK_FALSE(run_scenario(*find_scenario("pin_extraction"), o).ok());
}

TEST_CASE("assertion syntax") {
  auto v = parse_assertion("verdict=Blocked");
  REQUIRE(v.ok());
  CHECK(v->kind == Assertion::Kind::verdict);
  auto l = parse_assertion("ledger-contains=EmailSent,author:alice");
  REQUIRE(l.ok());
  CHECK(l->fields.at("author") == "alice");
  CHECK(parse_assertion("leaked=30")->count == 30);
  CHECK(parse_assertion("leaked-set-equals=window")->window);
  CHECK_FALSE(parse_assertion("verdict=Maybe").ok());
  CHECK_FALSE(parse_assertion("ledger-contains=Teleport").ok());
  CHECK_FALSE(parse_assertion("nonsense").ok());
}

TEST_CASE("example scenario files load and run as documented") {
  const auto dir = source_dir() / "data" / "scenarios";
  std::map<std::string, Verdict> want = {{"mail_forward", Verdict::succeeded},
                                         {"zoom_squat", Verdict::succeeded},
                                         {"delegation", Verdict::succeeded},
                                         {"pin_extraction", Verdict::succeeded},
                                         {"extraction_by_anchor_posts", Verdict::succeeded}};
  std::size_t ran = 0;
  for (const char* f : {"mail_forward.json", "zoom_squat.json", "builtin_matrix.json"}) {
    auto specs = load_scenario_file(dir / f);
    REQUIRE(specs.ok());
    for (const auto& s : *specs) {
      CAPTURE(s.name);
      ScenarioOptions o;
      o.profile = PolicyProfile::baseline(PlatformKind::slack);
      auto r = run_spec(s, o);
      REQUIRE(r.ok());
      CHECK(r->report.verdict == want.at(s.name));
      for (const auto& a : s.assertions) CHECK(check_assertion(a, *r).pass);
      ++ran;
      o.profile = PolicyProfile::all_countermeasures(PlatformKind::slack);
      auto guarded = run_spec(s, o);
      REQUIRE(guarded.ok());
      CHECK(guarded->report.verdict == Verdict::blocked);
    }
  }
  CHECK(ran == 5);
}

TEST_CASE("scenario file errors are reported, not run") {
  const auto tmp = std::filesystem::temp_directory_path() / "bcpsim_bad_scenario.json";
  auto write = [&](const std::string& text) {
    std::ofstream(tmp) << text;
    return load_scenario_file(tmp);
  };
  CHECK_FALSE(write("{").ok());
  CHECK_FALSE(write(R"({"builtin": "no_such"})").ok());
  CHECK_FALSE(write(R"({"steps": [{"action": "wait"}]})").ok());  // no expect
  CHECK_FALSE(write(R"({"builtin": "delegation", "options": {"grant": ["chat:levitate"]}})").ok());
  CHECK_FALSE(write(R"({"builtin": "delegation", "assert": ["verdict=Sometimes"]})").ok());
  CHECK(write(R"({"builtin": "delegation", "options": {"grant": ["chat:write"]}})").ok());
  std::filesystem::remove(tmp);
  CHECK_FALSE(load_scenario_file(tmp).ok());
}
