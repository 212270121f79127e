#include "bcpsim/core/scope.hpp"

#include <array>
#include <utility>

namespace bcpsim {

namespace {

struct ScopeInfo {
  Scope scope;
  std::string_view name;
};

constexpr std::array<ScopeInfo, 23> kCatalog = {{
    {Scope::channels_history, "channels:history"},
    {Scope::groups_history, "groups:history"},
    {Scope::groups_read, "groups:read"},
    {Scope::im_history, "im:history"},
    {Scope::mpim_history, "mpim:history"},
    {Scope::pins_read, "pins:read"},
    {Scope::reactions_read, "reactions:read"},
    {Scope::search_read, "search:read"},
    {Scope::stars_read, "stars:read"},
    {Scope::calls_write, "calls:write"},
    {Scope::chat_write, "chat:write"},
    {Scope::chat_write_human, "chat:write:human"},
    {Scope::chat_write_app, "chat:write:app"},
    {Scope::files_write, "files:write"},
    {Scope::pins_write, "pins:write"},
    {Scope::reactions_write, "reactions:write"},
    {Scope::stars_write, "stars:write"},
    {Scope::chat_write_customize, "chat:write.customize"},
    {Scope::commands, "commands"},
    {Scope::links_write, "links:write"},
    {Scope::message_handlers, "messageHandlers"},
    {Scope::chat_read_write, "Chat.ReadWrite"},
    {Scope::bot_commands, "bot-commands"},
}};

constexpr std::array<Scope, 23> kAll = [] {
  std::array<Scope, 23> out{};
  for (std::size_t i = 0; i < kCatalog.size(); ++i) out[i] = kCatalog[i].scope;
  return out;
}();

}  // namespace

std::string_view scope_name(Scope scope) {
  for (const auto& info : kCatalog) {
    if (info.scope == scope) return info.name;
  }
  return "?";
}

std::optional<Scope> parse_scope(std::string_view name) {
  for (const auto& info : kCatalog) {
    if (info.name == name) return info.scope;
  }
  return std::nullopt;
}

std::span<const Scope> all_scopes() { return kAll; }

bool is_read_scope(Scope scope) {
  switch (scope) {
    case Scope::channels_history:
    case Scope::groups_history:
    case Scope::groups_read:
    case Scope::im_history:
    case Scope::mpim_history:
    case Scope::pins_read:
    case Scope::reactions_read:
    case Scope::search_read:
    case Scope::stars_read:
      return true;
    default:
      return false;
  }
}

bool is_user_write_scope(Scope scope) {
  switch (scope) {
    case Scope::calls_write:
    case Scope::chat_write:
    case Scope::chat_write_human:
    case Scope::chat_write_app:
    case Scope::files_write:
    case Scope::pins_write:
    case Scope::reactions_write:
    case Scope::stars_write:
      return true;
    default:
      return false;
  }
}

std::string_view to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::bot: return "bot";
    case TokenKind::user_delegate: return "user_delegate";
    case TokenKind::graph_delegate: return "graph_delegate";
  }
  return "?";
}

std::vector<std::string> scope_names(const ScopeSet& scopes) {
  std::vector<std::string> out;
  out.reserve(scopes.size());
  for (Scope s : scopes) out.emplace_back(scope_name(s));
  return out;
}

std::string join_scopes(const ScopeSet& scopes) {
  std::string out;
  for (Scope s : scopes) {
    if (!out.empty()) out += ",";
    out += scope_name(s);
  }
  return out;
}

}  // namespace bcpsim
