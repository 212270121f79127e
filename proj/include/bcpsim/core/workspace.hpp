#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bcpsim/core/ids.hpp"
#include "bcpsim/core/message_id.hpp"
#include "bcpsim/core/principal.hpp"

namespace bcpsim {

inline constexpr std::size_t kMaxAttachmentChars = 8001;
inline constexpr std::size_t kMaxMessageChars = 40000;

enum class ChannelKind { public_channel, private_channel, direct, personal };

std::string_view to_string(ChannelKind kind);
std::optional<ChannelKind> parse_channel_kind(std::string_view text);

struct Channel {
  ChannelId id;
  std::string name;
  ChannelKind kind = ChannelKind::public_channel;
  std::set<UserId> users;
  std::set<AppId> bots;
  MessageCounter counter;

  bool has_user(const UserId& u) const { return users.contains(u); }
  bool has_bot(const AppId& a) const { return bots.contains(a); }
};

// Who a message or card appears to come from.
struct DisplayAuthor {
  bool bot = false;
  std::string id;  // user id or app id
  std::string name;
  std::string icon;

  friend bool operator==(const DisplayAuthor&, const DisplayAuthor&) = default;
};

struct MessageOrigin {
  ChannelId channel;
  MessageId message;
  friend bool operator==(const MessageOrigin&, const MessageOrigin&) = default;
};
struct FileOrigin {
  FileId file;
  friend bool operator==(const FileOrigin&, const FileOrigin&) = default;
};
struct ExternalOrigin {
  std::string url;
  friend bool operator==(const ExternalOrigin&, const ExternalOrigin&) = default;
};

using AttachmentOrigin = std::variant<MessageOrigin, FileOrigin, ExternalOrigin>;

std::string to_string(const AttachmentOrigin& origin);
std::optional<AttachmentOrigin> parse_origin(std::string_view text);

// Unfurled content appended to a carrier message. The origin is recorded
// regardless of whether the active policy consults it.
struct Attachment {
  std::string content;
  std::string author;
  AttachmentOrigin origin;
  std::optional<AppId> unfurled_by;  // nullopt: the platform itself
  std::string card_name;
  std::string card_icon;
  bool truncated = false;
};

// Builds an attachment, truncating content to kMaxAttachmentChars.
Attachment make_attachment(std::string content, std::string author, AttachmentOrigin origin,
                           std::optional<AppId> unfurled_by = std::nullopt);

struct Message {
  ChannelId channel;
  MessageId id;
  Principal issuer;
  DisplayAuthor display;
  std::string text;
  PostAction action = PostAction::user_text;
  std::vector<Attachment> attachments;
  std::vector<FileId> file_refs;
  bool deleted = false;
};

struct File {
  FileId id;
  Principal uploader;
  UserId owner;  // display user the upload is attributed to
  std::string name;
  std::string content;
  std::string public_url;
  std::set<ChannelId> shared_in;
};

struct User {
  UserId id;
  std::string name;
  std::map<std::string, std::string> linked_accounts;
  ChannelId personal_channel;
};

enum class SavedKind { pin, star, reaction };

std::string_view to_string(SavedKind kind);

// A pin, star, or emoji reaction, with the true issuer of the operation.
struct SavedItem {
  SavedKind kind = SavedKind::pin;
  ChannelId channel;
  MessageId message;
  Principal issuer;
  UserId owner;  // whose list the item appears in
  std::string emoji;

  friend bool operator==(const SavedItem&, const SavedItem&) = default;
};

struct CommandInvocation {
  InvocationId id;
  AppId app;
  ChannelId channel;
  UserId user;
  std::string command;
  std::string text;
  SimTime at = 0;
};

// Seeded generator for opaque random identifiers. Uses raw engine output so
// ids are identical across standard library implementations.
class IdGenerator {
 public:
  explicit IdGenerator(std::uint64_t seed) : engine_(seed) {}
  std::string next(char prefix, std::size_t length = 10);

 private:
  std::mt19937_64 engine_;
};

// Workspace state: users, channels, messages, files, and saved items.
// Value type; copies are independent snapshots.
class Workspace {
 public:
  Workspace(std::string name, std::uint64_t seed);

  const std::string& name() const noexcept { return name_; }

  const User& add_user(UserId id, std::string name,
                       std::map<std::string, std::string> linked_accounts = {});
  const User* find_user(const UserId& id) const;
  const User* user_by_name(std::string_view name) const;
  const std::map<UserId, User>& users() const noexcept { return users_; }

  ChannelId add_channel(std::string name, ChannelKind kind, std::set<UserId> users,
                        std::set<AppId> bots = {});
  Channel* find_channel(const ChannelId& id);
  const Channel* find_channel(const ChannelId& id) const;
  const Channel* channel_by_name(std::string_view name) const;
  const std::map<ChannelId, Channel>& channels() const noexcept { return channels_; }
  void add_bot(const ChannelId& channel, const AppId& app);

  // Direct channel between a user and another user or an app bot; created
  // on first use. A user "directing" themselves gets their personal channel.
  ChannelId direct_channel(const UserId& user, const UserId& other);
  ChannelId direct_channel(const UserId& user, const AppId& bot);

  // Public channels are open to every user; all others need membership.
  bool user_can_access(const UserId& user, const Channel& channel) const;

  // Allocates the next id in the channel's counter sequence.
  MessageId next_message_id(const ChannelId& channel, PostAction action, SimTime now);

  Message& add_message(Message message);
  Message* find_message(const ChannelId& channel, const MessageId& id);
  const Message* find_message(const ChannelId& channel, const MessageId& id) const;
  // Non-deleted messages in id order.
  std::vector<const Message*> history(const ChannelId& channel) const;
  // Every message, deleted or not, in id order.
  std::vector<const Message*> all_messages(const ChannelId& channel) const;
  // Id of the last message posted (deletions do not roll it back).
  std::optional<MessageId> latest_message_id(const ChannelId& channel) const;

  FileId next_file_id();
  File& add_file(File file);
  const File* find_file(const FileId& id) const;
  File* find_file(const FileId& id);

  std::vector<SavedItem>& saved_items() noexcept { return saved_; }
  const std::vector<SavedItem>& saved_items() const noexcept { return saved_; }

  CommandInvocation& add_invocation(CommandInvocation invocation);
  const CommandInvocation* find_invocation(InvocationId id) const;

  CounterIncrements& increments() noexcept { return increments_; }
  const CounterIncrements& increments() const noexcept { return increments_; }

  std::string next_id(char prefix) { return ids_.next(prefix); }

 private:
  std::string name_;
  IdGenerator ids_;
  CounterIncrements increments_;
  std::map<UserId, User> users_;
  std::map<ChannelId, Channel> channels_;
  std::map<ChannelId, std::map<MessageId, Message>> messages_;
  std::map<ChannelId, MessageId> latest_;
  std::map<FileId, File> files_;
  std::vector<SavedItem> saved_;
  std::map<InvocationId, CommandInvocation> invocations_;
};

}  // namespace bcpsim
