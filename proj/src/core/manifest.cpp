#include "bcpsim/core/manifest.hpp"

#include <algorithm>

#include "bcpsim/core/manifest_json.hpp"

namespace bcpsim {

std::string_view to_string(PlatformKind platform) {
  return platform == PlatformKind::slack ? "slack" : "teams";
}

std::optional<PlatformKind> parse_platform(std::string_view text) {
  if (text == "slack") return PlatformKind::slack;
  if (text == "teams") return PlatformKind::teams;
  return std::nullopt;
}

bool Manifest::subscribes(std::string_view event) const {
  return std::find(events.begin(), events.end(), event) != events.end();
}

std::vector<std::string> unknown_scope_names(const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (const auto& n : names) {
    if (!parse_scope(n)) out.push_back(n);
  }
  return out;
}

ScopeSet known_scopes(const std::vector<std::string>& names) {
  ScopeSet out;
  for (const auto& n : names) {
    if (auto s = parse_scope(n)) out.insert(*s);
  }
  return out;
}

namespace {

Result<std::vector<std::string>> string_list(const nlohmann::json& j, const char* key) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return out;
  if (!it->is_array()) {
    return make_error(Errc::malformed_manifest, std::string("\"") + key + "\" must be an array");
  }
  for (const auto& item : *it) {
    if (!item.is_string()) {
      return make_error(Errc::malformed_manifest,
                        std::string("\"") + key + "\" entries must be strings");
    }
    std::string s = item.get<std::string>();
    // command names are compared after trimming
    const auto first = s.find_first_not_of(" \t");
    const auto last = s.find_last_not_of(" \t");
    out.push_back(first == std::string::npos ? std::string{} : s.substr(first, last - first + 1));
  }
  return out;
}

}  // namespace

Result<Manifest> manifest_from_json(const nlohmann::json& j) {
  if (!j.is_object()) return make_error(Errc::malformed_manifest, "manifest must be an object");
  Manifest m;
  auto name = j.find("name");
  if (name == j.end() || !name->is_string() || name->get<std::string>().empty()) {
    return make_error(Errc::malformed_manifest, "\"name\" is required");
  }
  m.name = name->get<std::string>();
  if (auto p = j.find("platform"); p != j.end()) {
    if (!p->is_string()) return make_error(Errc::malformed_manifest, "\"platform\" must be a string");
    auto parsed = parse_platform(p->get<std::string>());
    if (!parsed) {
      return make_error(Errc::malformed_manifest,
                        "unknown platform \"" + p->get<std::string>() + "\"");
    }
    m.platform = *parsed;
  }
  if (auto i = j.find("icon"); i != j.end() && i->is_string()) m.icon = i->get<std::string>();

  struct Field {
    const char* key;
    std::vector<std::string>* dest;
  };
  for (Field f : {Field{"bot_scopes", &m.bot_scopes}, Field{"user_scopes", &m.user_scopes},
                  Field{"graph_scopes", &m.graph_scopes}, Field{"capabilities", &m.capabilities},
                  Field{"commands", &m.commands}, Field{"unfurl_domains", &m.unfurl_domains},
                  Field{"events", &m.events}}) {
    auto list = string_list(j, f.key);
    if (!list) return list.error();
    *f.dest = std::move(list).value();
  }
  for (const auto& c : m.commands) {
    if (c.size() < 2 || c.front() != '/') {
      return make_error(Errc::malformed_manifest, "command \"" + c + "\" must start with '/'");
    }
  }
  return m;
}

nlohmann::json manifest_to_json(const Manifest& m) {
  return nlohmann::json{
      {"name", m.name},
      {"platform", std::string(to_string(m.platform))},
      {"icon", m.icon},
      {"bot_scopes", m.bot_scopes},
      {"user_scopes", m.user_scopes},
      {"graph_scopes", m.graph_scopes},
      {"capabilities", m.capabilities},
      {"commands", m.commands},
      {"unfurl_domains", m.unfurl_domains},
      {"events", m.events},
  };
}

}  // namespace bcpsim
