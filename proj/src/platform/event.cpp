#include "bcpsim/platform/event.hpp"

namespace bcpsim {

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::message_posted: return "message_posted";
    case EventKind::reaction_added: return "reaction_added";
    case EventKind::file_shared: return "file_shared";
    case EventKind::command_invoked: return "command_invoked";
  }
  return "?";
}

std::string_view subscription_name(EventKind kind) {
  switch (kind) {
    case EventKind::message_posted: return "message";
    case EventKind::reaction_added: return "reaction_added";
    case EventKind::file_shared: return "file_shared";
    case EventKind::command_invoked: return "command";
  }
  return "?";
}

nlohmann::json to_json(const EventRecord& record) {
  using nlohmann::json;
  const Event& e = record.event;
  json delivered = json::array();
  for (const auto& app : record.delivered_to) delivered.push_back(app.str());
  json j{
      {"event_id", e.id.value},
      {"kind", std::string(to_string(e.kind))},
      {"at", e.at},
      {"channel", e.channel.str()},
      {"message", e.message ? json(e.message->str()) : json(nullptr)},
      {"display", e.display.name},
      {"display_user", e.display_user ? json(e.display_user->str()) : json(nullptr)},
      {"issuer", e.issuer ? json(to_string(*e.issuer)) : json(nullptr)},
      {"delivered_to", delivered},
  };
  if (!e.text.empty()) j["text"] = e.text;
  if (!e.emoji.empty()) j["emoji"] = e.emoji;
  if (e.file) j["file"] = e.file->str();
  if (!e.command.empty()) j["command"] = e.command;
  if (e.target_app) j["target_app"] = e.target_app->str();
  return j;
}

}  // namespace bcpsim
