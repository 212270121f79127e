#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "bcpsim/core/ids.hpp"
#include "bcpsim/core/message_id.hpp"
#include "bcpsim/core/principal.hpp"
#include "bcpsim/core/workspace.hpp"

namespace bcpsim {

enum class EventKind { message_posted, reaction_added, file_shared, command_invoked };

std::string_view to_string(EventKind kind);
// Manifest subscription name: "message", "reaction_added", "file_shared".
std::string_view subscription_name(EventKind kind);

struct Event {
  EventId id;
  EventKind kind = EventKind::message_posted;
  SimTime at = 0;
  ChannelId channel;
  std::optional<MessageId> message;
  DisplayAuthor display;              // who the action appears to come from
  std::optional<UserId> display_user;
  std::optional<Principal> issuer;    // only when the platform exposes it
  std::string text;
  std::string emoji;
  std::optional<FileId> file;
  std::optional<InvocationId> invocation;
  std::string command;
  std::optional<AppId> target_app;    // command events go to one app
};

struct EventRecord {
  Event event;
  std::vector<AppId> delivered_to;
};

nlohmann::json to_json(const EventRecord& record);

}  // namespace bcpsim
