#pragma once

#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace bcpsim {

// Permission scope catalog. Slack OAuth scopes, the split delegate-posting
// scopes, and the Teams capability / Graph equivalents.
enum class Scope {
  channels_history,
  groups_history,
  groups_read,
  im_history,
  mpim_history,
  pins_read,
  reactions_read,
  search_read,
  stars_read,
  calls_write,
  chat_write,
  chat_write_human,
  chat_write_app,
  files_write,
  pins_write,
  reactions_write,
  stars_write,
  chat_write_customize,
  commands,
  links_write,
  message_handlers,
  chat_read_write,
  bot_commands,
};

using ScopeSet = std::set<Scope>;

enum class TokenKind { bot, user_delegate, graph_delegate };

std::string_view scope_name(Scope scope);
std::optional<Scope> parse_scope(std::string_view name);
std::span<const Scope> all_scopes();

// "View ..." scopes of the user-token read list.
bool is_read_scope(Scope scope);
// "Do ... as you" scopes of the user-token write list.
bool is_user_write_scope(Scope scope);

std::string_view to_string(TokenKind kind);

std::vector<std::string> scope_names(const ScopeSet& scopes);
std::string join_scopes(const ScopeSet& scopes);

}  // namespace bcpsim
