#pragma once

#include <json.hpp>

#include "bcpsim/core/manifest.hpp"
#include "bcpsim/error.hpp"

namespace bcpsim {

// Manifest schema shared by bootstrap files and audit corpora:
//   {"name": str, "platform": "slack"|"teams", "icon": str,
//    "bot_scopes": [str], "user_scopes": [str], "graph_scopes": [str],
//    "capabilities": [str], "commands": [str], "unfurl_domains": [str],
//    "events": [str]}
// Only "name" is required; "platform" defaults to slack.
Result<Manifest> manifest_from_json(const nlohmann::json& j);
nlohmann::json manifest_to_json(const Manifest& m);

}  // namespace bcpsim
