#include <doctest.h>

#include <algorithm>
#include <random>

#include "../oracles.hpp"
#include "../support.hpp"
#include "bcpsim/audit/audit.hpp"

using namespace bcpsim;
using namespace bcpsim::test;

namespace {

void check_matches(const AuditReport& r, const RecountTotals& o) {
  CHECK(r.slack_total == o.slack);
  CHECK(r.teams_total == o.teams);
  CHECK(r.total == o.slack + o.teams);
  CHECK(r.capable_delegation.count == o.writers);
  CHECK(r.vulnerable_slack.count == o.readers);
  CHECK(r.command_users.count == o.command_users);
  CHECK(r.command_conflicts == o.command_conflicts);
  CHECK(r.vulnerable_teams.count == o.bot_commands);
  CHECK(r.domain_users.count == o.domain_users);
  CHECK(r.domain_conflicts == o.domain_conflicts);
  CHECK(r.without_groups_history.count == o.without_groups_history);
  CHECK(r.extraction_capable == o.extraction_capable);
}

bool has_issue(const std::vector<CorpusIssue>& issues, const std::string& file, std::size_t line,
               const std::string& needle) {
  return std::any_of(issues.begin(), issues.end(), [&](const CorpusIssue& i) {
    return i.file == file && i.line == line && i.message.find(needle) != std::string::npos;
  });
}

}  // namespace

TEST_CASE("audit counts agree with a brute-force recount") {
  for (const char* dir : {"desk", "directory_2021"}) {
    CAPTURE(dir);
    const Corpus corpus = load_corpus(fixture(dir));
    REQUIRE(corpus.rejects.empty());
    const auto raw = raw_manifests(fixture(dir));
    CHECK(raw.size() == corpus.entries.size());
    check_matches(audit(corpus.manifests()), brute_force_recount(raw));
  }
}

TEST_CASE("desk fixture by hand") {
  const AuditReport r = audit(load_corpus(fixture("desk")).manifests());
  CHECK(r.slack_total == 7);
  CHECK(r.teams_total == 3);
  CHECK(r.command_users.count == 4);
  CHECK(r.command_conflicts == 2);  // MeetNow and Zoom on /zoom
  CHECK(r.domain_conflicts == 2);   // lucid.app, case folded
  CHECK(r.extraction_capable == 2);  // Pinboard pair, Link Saver triple
  CHECK(r.domain_users.percent == doctest::Approx(66.7));
}

TEST_CASE("counts add up over disjoint splits") {
  const auto all = load_corpus(fixture("directory_2021")).manifests();
  std::vector<Manifest> slack, teams;
  for (const auto& m : all) (m.platform == PlatformKind::slack ? slack : teams).push_back(m);
  const AuditReport whole = audit(all), s = audit(slack), t = audit(teams);
  CHECK(whole.slack_total == s.slack_total);
  CHECK(whole.teams_total == t.teams_total);
  CHECK(whole.capable_delegation.count == s.capable_delegation.count);
  CHECK(whole.command_conflicts == s.command_conflicts);
  CHECK(whole.domain_conflicts == t.domain_conflicts);
  CHECK(whole.vulnerable_teams.count == t.vulnerable_teams.count);

  std::mt19937_64 rng(5);
  for (int round = 0; round < 5; ++round) {
    std::vector<Manifest> a, b;
    for (const auto& m : all) (rng() % 2 ? a : b).push_back(m);
    const AuditReport ra = audit(a), rb = audit(b);
    CHECK(ra.total + rb.total == whole.total);
    CHECK(ra.capable_delegation.count + rb.capable_delegation.count ==
          whole.capable_delegation.count);
    CHECK(ra.vulnerable_slack.count + rb.vulnerable_slack.count == whole.vulnerable_slack.count);
    CHECK(ra.command_users.count + rb.command_users.count == whole.command_users.count);
    CHECK(ra.vulnerable_teams.count + rb.vulnerable_teams.count == whole.vulnerable_teams.count);
    CHECK(ra.domain_users.count + rb.domain_users.count == whole.domain_users.count);
    CHECK(ra.without_groups_history.count + rb.without_groups_history.count ==
          whole.without_groups_history.count);
    CHECK(ra.extraction_capable + rb.extraction_capable == whole.extraction_capable);
    // A split can break a conflict apart but never create one.
    CHECK(ra.command_conflicts + rb.command_conflicts <= whole.command_conflicts);
  }
}

TEST_CASE("bad files and lines are rejected, the rest loads") {
  const Corpus c = load_corpus(fixture("corpus_errors"));
  CHECK(has_issue(c.rejects, "broken.json", 3, "not valid JSON"));
  CHECK(has_issue(c.rejects, "lines.jsonl", 4, "name"));
  CHECK(has_issue(c.rejects, "lines.jsonl", 5, "not valid JSON"));
  CHECK(has_issue(c.rejects, "lines.jsonl", 6, "'/'"));
  CHECK(c.rejects.size() == 4);
  CHECK(has_issue(c.warnings, "good.json", 1, "chat:levitate"));
  CHECK(has_issue(c.warnings, "lines.jsonl", 3, "Twin"));
  CHECK(c.warnings.size() == 2);
  CHECK(c.entries.size() == 3);
  for (const auto& e : c.entries) CHECK(e.file != "readme.txt");
  CHECK(audit(c.manifests()).unknown_scope_apps == 1);
}

TEST_CASE("an empty corpus audits to zeros") {
  const AuditReport r = audit({});
  CHECK(r.total == 0);
  CHECK(r.capable_delegation.count == 0);
  CHECK(r.capable_delegation.percent == 0.0);
  CHECK(r.domain_users.percent == 0.0);
  CHECK(conflict_map({}).commands.empty());
}

TEST_CASE("conflict map lists the colliding apps") {
  const ConflictMap m = conflict_map(load_corpus(fixture("desk")).manifests());
  REQUIRE(m.commands.contains("/zoom"));
  CHECK(m.commands.at("/zoom") == std::vector<std::string>{"MeetNow", "Zoom"});
  CHECK_FALSE(m.commands.contains("/meet"));  // Notes lacks the commands scope
  CHECK_FALSE(m.commands.contains("/Zoom"));
  REQUIRE(m.domains.contains("lucid.app"));
  CHECK(m.domains.at("lucid.app") == std::vector<std::string>{"Lucidchart", "Diagrams Plus"});
  CHECK(m.domains.size() == 1);
}

TEST_CASE("directory snapshot shares") {
  const AuditReport r = audit(load_corpus(fixture("directory_2021")).manifests());
  CHECK(r.slack_total == 2460);
  CHECK(r.teams_total == 1304);
  CHECK(r.capable_delegation.percent == doctest::Approx(22.9));
  CHECK(r.vulnerable_slack.percent == doctest::Approx(60.7));
  CHECK(r.command_users.percent == doctest::Approx(51.5));
  CHECK(r.vulnerable_teams.percent == doctest::Approx(32.7));
  CHECK(r.domain_users.percent == doctest::Approx(5.9));
  CHECK(r.command_conflicts == 270);
  CHECK(r.domain_conflicts == 13);
  CHECK(r.extraction_capable == 11);
  const auto j = to_json(r);
  CHECK(j.at("record") == "audit");
  CHECK(j.at("command_conflicts") == 270);
}
