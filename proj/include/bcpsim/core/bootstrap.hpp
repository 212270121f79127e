#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcpsim/core/manifest.hpp"
#include "bcpsim/core/workspace.hpp"
#include "bcpsim/error.hpp"

namespace bcpsim {

// Workspace bootstrap file. JSON document:
//
//   {
//     "workspace": "acme",
//     "start_time": 1616600000,
//     "users":    [{"id": "U0ALICE", "name": "alice", "linked_accounts": {"twitter": "@acme"}}],
//     "channels": [{"name": "secret-plans", "kind": "private", "members": ["alice", "bob"]}],
//     "messages": [{"channel": "secret-plans", "author": "bob", "text": "hi", "at": 1616599000}],
//     "apps":     [{"manifest": {...}, "behavior": "mail_bridge", "config": {...},
//                   "installed_by": "alice", "channels": ["mail-bridge"]}]
//   }
//
// Channel members and message authors are user names. Apps are installed in
// file order, only when the manifest platform matches the run's platform.
struct BootstrapUser {
  std::string id;
  std::string name;
  std::map<std::string, std::string> linked_accounts;
};

struct BootstrapChannel {
  std::string name;
  ChannelKind kind = ChannelKind::public_channel;
  std::vector<std::string> members;
};

struct BootstrapMessage {
  std::string channel;
  std::string author;
  std::string text;
  SimTime at = 0;
};

struct BootstrapApp {
  Manifest manifest;
  std::string behavior;  // victim-app kind, or empty for a passive app
  std::string config_json = "{}";
  std::string installed_by;
  std::vector<std::string> channels;  // bot invited to these
};

struct Bootstrap {
  std::string workspace = "acme";
  SimTime start_time = 1616600000;
  std::vector<BootstrapUser> users;
  std::vector<BootstrapChannel> channels;
  std::vector<BootstrapMessage> messages;
  std::vector<BootstrapApp> apps;

  const BootstrapApp* app_by_behavior(std::string_view behavior, PlatformKind platform) const;
};

Result<Bootstrap> parse_bootstrap(std::string_view json_text);
Result<Bootstrap> load_bootstrap_file(const std::filesystem::path& path);

// The built-in workspace used when no bootstrap file is given.
const Bootstrap& default_bootstrap();
std::string_view default_bootstrap_json();

// Users, channels, and initial messages; apps are installed by the platform.
Result<Workspace> build_workspace(const Bootstrap& bootstrap, std::uint64_t seed);

}  // namespace bcpsim
