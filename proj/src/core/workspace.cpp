#include "bcpsim/core/workspace.hpp"

#include <stdexcept>

namespace bcpsim {

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::public_channel: return "public";
    case ChannelKind::private_channel: return "private";
    case ChannelKind::direct: return "direct";
    case ChannelKind::personal: return "personal";
  }
  return "?";
}

std::optional<ChannelKind> parse_channel_kind(std::string_view text) {
  if (text == "public") return ChannelKind::public_channel;
  if (text == "private") return ChannelKind::private_channel;
  if (text == "direct") return ChannelKind::direct;
  if (text == "personal") return ChannelKind::personal;
  return std::nullopt;
}

std::string to_string(const AttachmentOrigin& origin) {
  struct Visitor {
    std::string operator()(const MessageOrigin& m) const {
      return "message:" + m.channel.str() + "/" + m.message.str();
    }
    std::string operator()(const FileOrigin& f) const { return "file:" + f.file.str(); }
    std::string operator()(const ExternalOrigin& e) const { return "external:" + e.url; }
  };
  return std::visit(Visitor{}, origin);
}

std::optional<AttachmentOrigin> parse_origin(std::string_view text) {
  if (text.starts_with("message:")) {
    std::string_view rest = text.substr(8);
    const auto slash = rest.find('/');
    if (slash == std::string_view::npos) return std::nullopt;
    auto id = MessageId::parse(rest.substr(slash + 1));
    if (!id) return std::nullopt;
    return MessageOrigin{ChannelId(std::string(rest.substr(0, slash))), *id};
  }
  if (text.starts_with("file:")) return FileOrigin{FileId(std::string(text.substr(5)))};
  if (text.starts_with("external:")) return ExternalOrigin{std::string(text.substr(9))};
  return std::nullopt;
}

std::string_view to_string(SavedKind kind) {
  switch (kind) {
    case SavedKind::pin: return "pin";
    case SavedKind::star: return "star";
    case SavedKind::reaction: return "reaction";
  }
  return "?";
}

Attachment make_attachment(std::string content, std::string author, AttachmentOrigin origin,
                           std::optional<AppId> unfurled_by) {
  Attachment a;
  if (content.size() > kMaxAttachmentChars) {
    content.resize(kMaxAttachmentChars);
    a.truncated = true;
  }
  a.content = std::move(content);
  a.author = std::move(author);
  a.origin = std::move(origin);
  a.unfurled_by = std::move(unfurled_by);
  return a;
}

std::string IdGenerator::next(char prefix, std::size_t length) {
  static constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  std::string out(1, prefix);
  for (std::size_t i = 1; i < length; ++i) out += kAlphabet[engine_() % 36];
  return out;
}

Workspace::Workspace(std::string name, std::uint64_t seed) : name_(std::move(name)), ids_(seed) {}

const User& Workspace::add_user(UserId id, std::string name,
                                std::map<std::string, std::string> linked_accounts) {
  if (users_.contains(id)) throw std::invalid_argument("duplicate user id " + id.str());
  User user{id, std::move(name), std::move(linked_accounts), {}};
  user.personal_channel = add_channel(user.name + "-personal", ChannelKind::personal, {id});
  return users_.emplace(id, std::move(user)).first->second;
}

const User* Workspace::find_user(const UserId& id) const {
  auto it = users_.find(id);
  return it == users_.end() ? nullptr : &it->second;
}

const User* Workspace::user_by_name(std::string_view name) const {
  for (const auto& [id, user] : users_) {
    if (user.name == name) return &user;
  }
  return nullptr;
}

ChannelId Workspace::add_channel(std::string name, ChannelKind kind, std::set<UserId> users,
                                 std::set<AppId> bots) {
  char prefix = 'C';
  if (kind == ChannelKind::private_channel) prefix = 'G';
  if (kind == ChannelKind::direct || kind == ChannelKind::personal) prefix = 'D';
  ChannelId id(ids_.next(prefix));
  while (channels_.contains(id)) id = ChannelId(ids_.next(prefix));
  Channel channel;
  channel.id = id;
  channel.name = std::move(name);
  channel.kind = kind;
  channel.users = std::move(users);
  channel.bots = std::move(bots);
  channels_.emplace(id, std::move(channel));
  return id;
}

Channel* Workspace::find_channel(const ChannelId& id) {
  auto it = channels_.find(id);
  return it == channels_.end() ? nullptr : &it->second;
}

const Channel* Workspace::find_channel(const ChannelId& id) const {
  auto it = channels_.find(id);
  return it == channels_.end() ? nullptr : &it->second;
}

const Channel* Workspace::channel_by_name(std::string_view name) const {
  for (const auto& [id, channel] : channels_) {
    if (channel.name == name) return &channel;
  }
  return nullptr;
}

void Workspace::add_bot(const ChannelId& channel, const AppId& app) {
  if (auto* c = find_channel(channel)) c->bots.insert(app);
}

ChannelId Workspace::direct_channel(const UserId& user, const UserId& other) {
  if (user == other) {
    const User* u = find_user(user);
    if (!u) throw std::invalid_argument("unknown user " + user.str());
    return u->personal_channel;
  }
  const std::set<UserId> pair{user, other};
  for (const auto& [id, channel] : channels_) {
    if (channel.kind == ChannelKind::direct && channel.bots.empty() && channel.users == pair) {
      return id;
    }
  }
  return add_channel("dm-" + pair.begin()->str() + "-" + pair.rbegin()->str(), ChannelKind::direct,
                     pair);
}

ChannelId Workspace::direct_channel(const UserId& user, const AppId& bot) {
  for (const auto& [id, channel] : channels_) {
    if (channel.kind == ChannelKind::direct && channel.users == std::set<UserId>{user} &&
        channel.bots == std::set<AppId>{bot}) {
      return id;
    }
  }
  return add_channel("dm-" + user.str() + "-" + bot.str(), ChannelKind::direct, {user}, {bot});
}

bool Workspace::user_can_access(const UserId& user, const Channel& channel) const {
  if (channel.kind == ChannelKind::public_channel) return true;
  return channel.has_user(user);
}

MessageId Workspace::next_message_id(const ChannelId& channel, PostAction action, SimTime now) {
  Channel* c = find_channel(channel);
  if (!c) throw std::invalid_argument("unknown channel " + channel.str());
  return c->counter.advance(action, now, increments_);
}

Message& Workspace::add_message(Message message) {
  auto& slot = messages_[message.channel];
  const ChannelId channel = message.channel;
  const MessageId id = message.id;
  auto [it, inserted] = slot.emplace(id, std::move(message));
  if (!inserted) throw std::invalid_argument("duplicate message id " + id.str());
  auto& latest = latest_[channel];
  if (latest < id) latest = id;
  return it->second;
}

Message* Workspace::find_message(const ChannelId& channel, const MessageId& id) {
  auto ch = messages_.find(channel);
  if (ch == messages_.end()) return nullptr;
  auto it = ch->second.find(id);
  return it == ch->second.end() ? nullptr : &it->second;
}

const Message* Workspace::find_message(const ChannelId& channel, const MessageId& id) const {
  auto ch = messages_.find(channel);
  if (ch == messages_.end()) return nullptr;
  auto it = ch->second.find(id);
  return it == ch->second.end() ? nullptr : &it->second;
}

std::vector<const Message*> Workspace::history(const ChannelId& channel) const {
  std::vector<const Message*> out;
  auto ch = messages_.find(channel);
  if (ch == messages_.end()) return out;
  for (const auto& [id, m] : ch->second) {
    if (!m.deleted) out.push_back(&m);
  }
  return out;
}

std::vector<const Message*> Workspace::all_messages(const ChannelId& channel) const {
  std::vector<const Message*> out;
  auto ch = messages_.find(channel);
  if (ch == messages_.end()) return out;
  for (const auto& [id, m] : ch->second) out.push_back(&m);
  return out;
}

std::optional<MessageId> Workspace::latest_message_id(const ChannelId& channel) const {
  auto it = latest_.find(channel);
  if (it == latest_.end()) return std::nullopt;
  return it->second;
}

FileId Workspace::next_file_id() {
  FileId id(ids_.next('F'));
  while (files_.contains(id)) id = FileId(ids_.next('F'));
  return id;
}

File& Workspace::add_file(File file) {
  const FileId id = file.id;
  auto [it, inserted] = files_.emplace(id, std::move(file));
  if (!inserted) throw std::invalid_argument("duplicate file id " + id.str());
  return it->second;
}

const File* Workspace::find_file(const FileId& id) const {
  auto it = files_.find(id);
  return it == files_.end() ? nullptr : &it->second;
}

File* Workspace::find_file(const FileId& id) {
  auto it = files_.find(id);
  return it == files_.end() ? nullptr : &it->second;
}

CommandInvocation& Workspace::add_invocation(CommandInvocation invocation) {
  const InvocationId id = invocation.id;
  return invocations_.insert_or_assign(id, std::move(invocation)).first->second;
}

const CommandInvocation* Workspace::find_invocation(InvocationId id) const {
  auto it = invocations_.find(id);
  return it == invocations_.end() ? nullptr : &it->second;
}

}  // namespace bcpsim
