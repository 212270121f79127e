#pragma once

#include <optional>
#include <string>
#include <vector>

#include "bcpsim/core/scope.hpp"

namespace bcpsim {

enum class PlatformKind { slack, teams };

std::string_view to_string(PlatformKind platform);
std::optional<PlatformKind> parse_platform(std::string_view text);

// App manifest as declared to the platform. Scope names are kept verbatim so
// that audits can report names outside the catalog.
struct Manifest {
  std::string name;
  PlatformKind platform = PlatformKind::slack;
  std::string icon;
  std::vector<std::string> bot_scopes;
  std::vector<std::string> user_scopes;
  std::vector<std::string> graph_scopes;
  std::vector<std::string> capabilities;  // teams: bot-commands, messageHandlers
  std::vector<std::string> commands;
  std::vector<std::string> unfurl_domains;
  std::vector<std::string> events;  // message, reaction_added, file_shared

  bool subscribes(std::string_view event) const;
};

// Names from `names` that are not in the scope catalog.
std::vector<std::string> unknown_scope_names(const std::vector<std::string>& names);
// Catalog scopes among `names`; unknown names are skipped.
ScopeSet known_scopes(const std::vector<std::string>& names);

}  // namespace bcpsim
