#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bcpsim/core/manifest.hpp"

namespace bcpsim {

struct CorpusEntry {
  Manifest manifest;
  std::string file;
  std::size_t line = 0;
};

struct CorpusIssue {
  std::string file;
  std::size_t line = 0;  // 1-based; 0 when not attributable to a line
  std::string message;
};

struct Corpus {
  std::vector<CorpusEntry> entries;
  std::vector<CorpusIssue> rejects;   // not loaded
  std::vector<CorpusIssue> warnings;  // loaded anyway

  std::vector<Manifest> manifests() const;
};

// Reads every *.json (one manifest or an array of them) and *.jsonl (one
// manifest per line) file under `dir`, in sorted path order. Nothing is
// fatal: bad files and lines go to `rejects`.
Corpus load_corpus(const std::filesystem::path& dir);
// Same for in-memory text; `jsonl` selects line-delimited parsing.
void parse_corpus_text(Corpus& corpus, std::string_view text, const std::string& file,
                       bool jsonl);
// Flags duplicate names and unknown scopes. Called by load_corpus.
void add_corpus_warnings(Corpus& corpus);

struct CountPct {
  std::size_t count = 0;
  double percent = 0.0;  // of the platform total, one decimal
};

struct AuditReport {
  std::size_t total = 0;
  std::size_t slack_total = 0;
  std::size_t teams_total = 0;

  CountPct capable_delegation;     // slack: >= 1 write user scope
  CountPct vulnerable_slack;       // slack: >= 1 read user scope
  CountPct vulnerable_teams;       // teams: bot-commands
  CountPct command_users;          // slack: commands scope and >= 1 command
  std::size_t command_conflicts = 0;  // command users sharing a name with another app
  CountPct domain_users;           // teams: messageHandlers
  std::size_t domain_conflicts = 0;   // domain users sharing a domain with another app
  CountPct without_groups_history;    // slack
  std::size_t extraction_capable = 0; // of those without groups:history
  std::size_t unknown_scope_apps = 0;
};

double percent_of(std::size_t count, std::size_t total);

AuditReport audit(const std::vector<Manifest>& corpus);

// True when the user scopes give a pins/stars/reactions read+write pair or
// the link-unfurl triple (groups:read, a post scope, im:history).
bool extraction_scopes(const Manifest& m);
bool requests_groups_history(const Manifest& m);

// Every command / unfurl domain with two or more registering apps. Names are
// compared case-sensitively after trimming; domains are lower-cased.
struct ConflictMap {
  std::map<std::string, std::vector<std::string>> commands;
  std::map<std::string, std::vector<std::string>> domains;
};
ConflictMap conflict_map(const std::vector<Manifest>& corpus);

nlohmann::json to_json(const AuditReport& r);
nlohmann::json to_json(const ConflictMap& m);
std::string format_table(const AuditReport& r);
std::string format_table(const ConflictMap& m);

}  // namespace bcpsim
