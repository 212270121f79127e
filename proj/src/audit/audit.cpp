#include "bcpsim/audit/audit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bcpsim/core/manifest_json.hpp"

namespace bcpsim {

namespace fs = std::filesystem;

std::vector<Manifest> Corpus::manifests() const {
  std::vector<Manifest> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(e.manifest);
  return out;
}

namespace {

std::size_t line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + offset, '\n'));
}

void add_manifest(Corpus& corpus, const nlohmann::json& j, const std::string& file,
                  std::size_t line, const std::string& where) {
  auto m = manifest_from_json(j);
  if (!m) {
    corpus.rejects.push_back({file, line, where + m.error().detail});
    return;
  }
  corpus.entries.push_back({std::move(m).value(), file, line});
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return s;
}

}  // namespace

void parse_corpus_text(Corpus& corpus, std::string_view text, const std::string& file,
                       bool jsonl) {
  if (jsonl) {
    std::size_t line = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const std::size_t end = std::min(text.find('\n', pos), text.size());
      ++line;
      const std::string_view raw = text.substr(pos, end - pos);
      pos = end + 1;
      if (trim(raw).empty()) {
        if (end == text.size()) break;
        continue;
      }
      auto j = nlohmann::json::parse(raw, nullptr, false);
      if (j.is_discarded()) {
        corpus.rejects.push_back({file, line, "not valid JSON"});
      } else {
        add_manifest(corpus, j, file, line, "");
      }
      if (end == text.size()) break;
    }
    return;
  }
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    corpus.rejects.push_back({file, line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0),
                              "not valid JSON"});
    return;
  }
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      add_manifest(corpus, j[i], file, 0, "element " + std::to_string(i) + ": ");
    }
  } else {
    add_manifest(corpus, j, file, 1, "");
  }
}

void add_corpus_warnings(Corpus& corpus) {
  std::map<std::pair<PlatformKind, std::string>, std::size_t> first;
  for (std::size_t i = 0; i < corpus.entries.size(); ++i) {
    const auto& e = corpus.entries[i];
    const Manifest& m = e.manifest;
    auto [it, fresh] = first.emplace(std::make_pair(m.platform, m.name), i);
    if (!fresh) {
      const auto& prev = corpus.entries[it->second];
      corpus.warnings.push_back({e.file, e.line,
                                 "duplicate app name \"" + m.name + "\" (first at " + prev.file +
                                     ":" + std::to_string(prev.line) + ")"});
    }
    for (const auto* list : {&m.bot_scopes, &m.user_scopes, &m.graph_scopes, &m.capabilities}) {
      for (const auto& name : unknown_scope_names(*list)) {
        corpus.warnings.push_back({e.file, e.line,
                                   "app \"" + m.name + "\": unknown scope \"" + name + "\""});
      }
    }
  }
}

Corpus load_corpus(const fs::path& dir) {
  Corpus corpus;
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    corpus.rejects.push_back({dir.string(), 0, "not a directory"});
    return corpus;
  }
  std::vector<fs::path> files;
  for (const auto& entry : fs::recursive_directory_iterator(dir, ec)) {
    if (!entry.is_regular_file()) continue;
    const auto ext = entry.path().extension();
    if (ext == ".json" || ext == ".jsonl") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& path : files) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string name = fs::relative(path, dir, ec).generic_string();
    parse_corpus_text(corpus, buf.str(), name.empty() ? path.string() : name,
                      path.extension() == ".jsonl");
  }
  add_corpus_warnings(corpus);
  return corpus;
}

double percent_of(std::size_t count, std::size_t total) {
  if (total == 0) return 0.0;
  return std::round(1000.0 * static_cast<double>(count) / static_cast<double>(total)) / 10.0;
}

namespace {

bool has_name(const std::vector<std::string>& list, std::string_view name) {
  return std::any_of(list.begin(), list.end(), [&](const std::string& s) { return s == name; });
}

bool is_command_user(const Manifest& m) {
  return m.platform == PlatformKind::slack && !m.commands.empty() &&
         (has_name(m.bot_scopes, "commands") || has_name(m.user_scopes, "commands"));
}

bool is_domain_user(const Manifest& m) {
  return m.platform == PlatformKind::teams && has_name(m.capabilities, "messageHandlers");
}

// Names claimed by two or more distinct apps among `apps`.
std::map<std::string, std::vector<std::size_t>> shared_names(
    const std::vector<Manifest>& corpus, bool (*eligible)(const Manifest&),
    std::vector<std::string> (*names)(const Manifest&)) {
  std::map<std::string, std::vector<std::size_t>> owners;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    if (!eligible(corpus[i])) continue;
    std::set<std::string> mine;
    for (auto& n : names(corpus[i])) mine.insert(n);
    for (const auto& n : mine) owners[n].push_back(i);
  }
  std::erase_if(owners, [](const auto& kv) { return kv.second.size() < 2; });
  return owners;
}

std::vector<std::string> command_names(const Manifest& m) {
  std::vector<std::string> out;
  for (const auto& c : m.commands) out.push_back(trim(c));
  return out;
}

std::vector<std::string> domain_names(const Manifest& m) {
  std::vector<std::string> out;
  for (const auto& d : m.unfurl_domains) out.push_back(lower(trim(d)));
  return out;
}

}  // namespace

bool requests_groups_history(const Manifest& m) {
  return has_name(m.bot_scopes, "groups:history") || has_name(m.user_scopes, "groups:history");
}

bool extraction_scopes(const Manifest& m) {
  const ScopeSet u = known_scopes(m.user_scopes);
  auto pair = [&](Scope r, Scope w) { return u.contains(r) && u.contains(w); };
  if (pair(Scope::pins_read, Scope::pins_write) || pair(Scope::stars_read, Scope::stars_write) ||
      pair(Scope::reactions_read, Scope::reactions_write)) {
    return true;
  }
  const bool post = u.contains(Scope::chat_write) || u.contains(Scope::chat_write_human);
  return post && u.contains(Scope::groups_read) && u.contains(Scope::im_history);
}

AuditReport audit(const std::vector<Manifest>& corpus) {
  AuditReport r;
  r.total = corpus.size();
  for (const auto& m : corpus) {
    const auto unknown = [&] {
      for (const auto* list : {&m.bot_scopes, &m.user_scopes, &m.graph_scopes, &m.capabilities}) {
        if (!unknown_scope_names(*list).empty()) return true;
      }
      return false;
    }();
    r.unknown_scope_apps += unknown ? 1 : 0;

    if (m.platform == PlatformKind::teams) {
      ++r.teams_total;
      if (has_name(m.capabilities, "bot-commands")) ++r.vulnerable_teams.count;
      if (is_domain_user(m)) ++r.domain_users.count;
      continue;
    }
    ++r.slack_total;
    const ScopeSet user = known_scopes(m.user_scopes);
    if (std::any_of(user.begin(), user.end(), is_user_write_scope)) ++r.capable_delegation.count;
    if (std::any_of(user.begin(), user.end(), is_read_scope)) ++r.vulnerable_slack.count;
    if (is_command_user(m)) ++r.command_users.count;
    if (!requests_groups_history(m)) {
      ++r.without_groups_history.count;
      if (extraction_scopes(m)) ++r.extraction_capable;
    }
  }

  std::set<std::size_t> cmd_apps;
  for (const auto& [name, owners] : shared_names(corpus, is_command_user, command_names)) {
    cmd_apps.insert(owners.begin(), owners.end());
  }
  r.command_conflicts = cmd_apps.size();
  std::set<std::size_t> dom_apps;
  for (const auto& [name, owners] : shared_names(corpus, is_domain_user, domain_names)) {
    dom_apps.insert(owners.begin(), owners.end());
  }
  r.domain_conflicts = dom_apps.size();

  for (CountPct* c : {&r.capable_delegation, &r.vulnerable_slack, &r.command_users,
                      &r.without_groups_history}) {
    c->percent = percent_of(c->count, r.slack_total);
  }
  for (CountPct* c : {&r.vulnerable_teams, &r.domain_users}) {
    c->percent = percent_of(c->count, r.teams_total);
  }
  return r;
}

ConflictMap conflict_map(const std::vector<Manifest>& corpus) {
  ConflictMap out;
  for (const auto& [name, owners] : shared_names(corpus, is_command_user, command_names)) {
    for (auto i : owners) out.commands[name].push_back(corpus[i].name);
  }
  for (const auto& [name, owners] : shared_names(corpus, is_domain_user, domain_names)) {
    for (auto i : owners) out.domains[name].push_back(corpus[i].name);
  }
  return out;
}

nlohmann::json to_json(const AuditReport& r) {
  auto cp = [](const CountPct& c) { return nlohmann::json{{"count", c.count}, {"percent", c.percent}}; };
  return {{"record", "audit"},
          {"total", r.total},
          {"slack_total", r.slack_total},
          {"teams_total", r.teams_total},
          {"capable_delegation", cp(r.capable_delegation)},
          {"vulnerable_delegation_slack", cp(r.vulnerable_slack)},
          {"vulnerable_delegation_teams", cp(r.vulnerable_teams)},
          {"command_users", cp(r.command_users)},
          {"command_conflicts", r.command_conflicts},
          {"domain_users", cp(r.domain_users)},
          {"domain_conflicts", r.domain_conflicts},
          {"without_groups_history", cp(r.without_groups_history)},
          {"extraction_capable", r.extraction_capable},
          {"unknown_scope_apps", r.unknown_scope_apps}};
}

nlohmann::json to_json(const ConflictMap& m) {
  return {{"record", "conflicts"}, {"commands", m.commands}, {"domains", m.domains}};
}

std::string format_table(const AuditReport& r) {
  std::ostringstream os;
  auto row = [&](const std::string& label, const std::string& value) {
    os << "  " << label << std::string(label.size() < 44 ? 44 - label.size() : 1, ' ') << value
       << "\n";
  };
  auto cp = [](const CountPct& c) {
    std::ostringstream v;
    v.setf(std::ios::fixed);
    v.precision(1);
    v << c.count << " (" << c.percent << "%)";
    return v.str();
  };
  os << "apps: " << r.total << " (slack " << r.slack_total << ", teams " << r.teams_total << ")\n";
  os << "slack\n";
  row("write user scope (capable of delegation)", cp(r.capable_delegation));
  row("read user scope (vulnerable to delegation)", cp(r.vulnerable_slack));
  row("slash command users", cp(r.command_users));
  row("apps in command conflicts", std::to_string(r.command_conflicts));
  row("without groups:history", cp(r.without_groups_history));
  row("extraction capable (of those)", std::to_string(r.extraction_capable));
  os << "teams\n";
  row("bot-commands (vulnerable to delegation)", cp(r.vulnerable_teams));
  row("messageHandlers (domain users)", cp(r.domain_users));
  row("apps in domain conflicts", std::to_string(r.domain_conflicts));
  if (r.unknown_scope_apps > 0) {
    os << "apps with unknown scopes: " << r.unknown_scope_apps << "\n";
  }
  return os.str();
}

std::string format_table(const ConflictMap& m) {
  std::ostringstream os;
  auto section = [&](const char* title, const std::map<std::string, std::vector<std::string>>& map) {
    os << title << " (" << map.size() << ")\n";
    for (const auto& [name, owners] : map) {
      os << "  " << name << ":";
      for (std::size_t i = 0; i < owners.size(); ++i) os << (i ? ", " : " ") << owners[i];
      os << "\n";
    }
  };
  section("shared commands", m.commands);
  section("shared domains", m.domains);
  return os.str();
}

}  // namespace bcpsim
