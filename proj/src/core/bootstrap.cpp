#include "bcpsim/core/bootstrap.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "bcpsim/core/manifest_json.hpp"

namespace bcpsim {

// Defined in the generated default_workspace.cpp.
extern const char* const kDefaultWorkspaceJson;

namespace {

using nlohmann::json;

Error bad(std::string detail) { return make_error(Errc::invalid_argument, std::move(detail)); }

std::string string_field(const json& j, const char* key, std::string fallback = {}) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string()) return fallback;
  return it->get<std::string>();
}

std::vector<std::string> string_array(const json& j, const char* key) {
  std::vector<std::string> out;
  auto it = j.find(key);
  if (it == j.end() || !it->is_array()) return out;
  for (const auto& v : *it) {
    if (v.is_string()) out.push_back(v.get<std::string>());
  }
  return out;
}

std::string default_user_id(const std::string& name) {
  std::string id = "U";
  for (char c : name) id += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  return id;
}

}  // namespace

const BootstrapApp* Bootstrap::app_by_behavior(std::string_view behavior,
                                               PlatformKind platform) const {
  for (const auto& app : apps) {
    if (app.behavior == behavior && app.manifest.platform == platform) return &app;
  }
  return nullptr;
}

Result<Bootstrap> parse_bootstrap(std::string_view json_text) {
  json doc = json::parse(json_text, nullptr, false);
  if (doc.is_discarded()) return bad("workspace file is not valid JSON");
  if (!doc.is_object()) return bad("workspace file must be a JSON object");

  Bootstrap b;
  b.workspace = string_field(doc, "workspace", b.workspace);
  if (auto it = doc.find("start_time"); it != doc.end()) {
    if (!it->is_number_unsigned()) return bad("\"start_time\" must be a non-negative integer");
    b.start_time = it->get<SimTime>();
  }

  for (const auto& u : doc.value("users", json::array())) {
    BootstrapUser user;
    user.name = string_field(u, "name");
    if (user.name.empty()) return bad("user entry without \"name\"");
    user.id = string_field(u, "id", default_user_id(user.name));
    if (auto la = u.find("linked_accounts"); la != u.end() && la->is_object()) {
      for (const auto& [k, v] : la->items()) {
        if (v.is_string()) user.linked_accounts[k] = v.get<std::string>();
      }
    }
    b.users.push_back(std::move(user));
  }

  for (const auto& c : doc.value("channels", json::array())) {
    BootstrapChannel channel;
    channel.name = string_field(c, "name");
    if (channel.name.empty()) return bad("channel entry without \"name\"");
    auto kind = parse_channel_kind(string_field(c, "kind", "public"));
    if (!kind || *kind == ChannelKind::personal) {
      return bad("channel \"" + channel.name + "\" has an invalid kind");
    }
    channel.kind = *kind;
    channel.members = string_array(c, "members");
    b.channels.push_back(std::move(channel));
  }

  for (const auto& m : doc.value("messages", json::array())) {
    BootstrapMessage message;
    message.channel = string_field(m, "channel");
    message.author = string_field(m, "author");
    message.text = string_field(m, "text");
    message.at = m.value("at", b.start_time);
    if (message.at > b.start_time) return bad("initial message after start_time");
    b.messages.push_back(std::move(message));
  }

  for (const auto& a : doc.value("apps", json::array())) {
    auto manifest = manifest_from_json(a.value("manifest", json::object()));
    if (!manifest) return manifest.error();
    BootstrapApp app;
    app.manifest = std::move(manifest).value();
    app.behavior = string_field(a, "behavior");
    app.config_json = a.value("config", json::object()).dump();
    app.installed_by = string_field(a, "installed_by");
    app.channels = string_array(a, "channels");
    b.apps.push_back(std::move(app));
  }
  return b;
}

Result<Bootstrap> load_bootstrap_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return bad("cannot open workspace file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_bootstrap(text.str());
}

std::string_view default_bootstrap_json() { return kDefaultWorkspaceJson; }

const Bootstrap& default_bootstrap() {
  static const Bootstrap instance = [] {
    auto parsed = parse_bootstrap(default_bootstrap_json());
    return std::move(parsed).value();
  }();
  return instance;
}

Result<Workspace> build_workspace(const Bootstrap& bootstrap, std::uint64_t seed) {
  Workspace ws(bootstrap.workspace, seed);
  for (const auto& u : bootstrap.users) {
    if (ws.find_user(UserId(u.id))) return bad("duplicate user id " + u.id);
    ws.add_user(UserId(u.id), u.name, u.linked_accounts);
  }
  auto user_id = [&](const std::string& name) -> std::optional<UserId> {
    if (const User* u = ws.user_by_name(name)) return u->id;
    return std::nullopt;
  };
  for (const auto& c : bootstrap.channels) {
    if (ws.channel_by_name(c.name)) return bad("duplicate channel name " + c.name);
    std::set<UserId> members;
    for (const auto& name : c.members) {
      auto id = user_id(name);
      if (!id) return bad("channel \"" + c.name + "\" names unknown member " + name);
      members.insert(*id);
    }
    ws.add_channel(c.name, c.kind, std::move(members));
  }

  std::vector<BootstrapMessage> messages = bootstrap.messages;
  std::stable_sort(messages.begin(), messages.end(),
                   [](const auto& a, const auto& b) { return a.at < b.at; });
  for (const auto& m : messages) {
    const Channel* channel = ws.channel_by_name(m.channel);
    if (!channel) return bad("message in unknown channel " + m.channel);
    auto author = user_id(m.author);
    if (!author) return bad("message by unknown user " + m.author);
    const User* user = ws.find_user(*author);
    Message message;
    message.channel = channel->id;
    message.id = ws.next_message_id(channel->id, PostAction::user_text, m.at);
    message.issuer = UserPrincipal{*author};
    message.display = DisplayAuthor{false, author->str(), user->name, {}};
    message.text = m.text.substr(0, kMaxMessageChars);
    ws.add_message(std::move(message));
  }
  return ws;
}

}  // namespace bcpsim
