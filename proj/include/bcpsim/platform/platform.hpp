#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "bcpsim/core/bootstrap.hpp"
#include "bcpsim/core/workspace.hpp"
#include "bcpsim/error.hpp"
#include "bcpsim/permission/engine.hpp"
#include "bcpsim/platform/behavior.hpp"
#include "bcpsim/platform/event.hpp"
#include "bcpsim/platform/unfurl_queue.hpp"

namespace bcpsim {

struct ChannelName {
  std::string name;
};

// Where to post: a channel by id or by name, a user (direct message, or the
// acting user's own personal channel), or an app's bot DM.
using PostTarget = std::variant<ChannelId, ChannelName, UserId, AppId>;

struct PostOptions {
  std::optional<std::string> display_name;  // needs chat:write.customize
  std::optional<std::string> display_icon;
};

struct PostedMessage {
  ChannelId channel;
  MessageId id;
};

struct ChannelMetadata {
  ChannelId id;
  std::string name;
  ChannelKind kind = ChannelKind::public_channel;
  std::optional<MessageId> latest;
};

struct SavedEntry {
  SavedKind kind = SavedKind::pin;
  ChannelId channel;
  MessageId message;
  std::string emoji;
  std::optional<std::string> content;  // omitted when the read rule denies it
};

struct ScheduledMessage {
  ScheduledId id;
  GrantId grant;
  AppId app;
  ChannelId channel;
  std::string text;
  SimTime fire_at = 0;
  bool done = false;
  bool fired = false;
};

struct RemovalReport {
  AppId app;
  std::vector<GrantId> revoked;
  std::vector<GrantId> residual_grants;
  struct Pending {
    ScheduledId id;
    SimTime fire_at = 0;
    bool will_fire = false;
  };
  std::vector<Pending> pending_scheduled;

  // Grants that survived plus scheduled messages that will still fire.
  std::size_t residual_count() const;
};

struct InvocationResult {
  InvocationId id;
  AppId app;
  std::string routed_name;
};

struct UnfurlRecord {
  std::uint64_t job = 0;
  SimTime enqueued_at = 0;
  SimTime resolved_at = 0;
  ChannelId channel;
  MessageId message;
  std::string url;
  std::string outcome;  // "attached", or why nothing was attached
  std::vector<std::string> renderers;  // "platform" or app ids
};

class Platform;
using BehaviorFactory =
    std::function<std::unique_ptr<AppBehavior>(const BootstrapApp&, const Platform&)>;

// The simulated platform: owns the workspace, the app registry, and the
// clock. Every app call is mediated by the permission engine and leaves a
// trace; user (client) calls are not mediated but still drive events.
class Platform {
 public:
  Platform(Workspace workspace, PolicyProfile profile, SimTime start);

  // Builds the workspace and installs the bootstrap apps matching the
  // profile's platform. `factory` supplies behaviors; may be empty.
  static Result<std::unique_ptr<Platform>> from_bootstrap(const Bootstrap& bootstrap,
                                                          PolicyProfile profile,
                                                          std::uint64_t seed,
                                                          const BehaviorFactory& factory,
                                                          std::string trace_label = "run");

  const Workspace& workspace() const noexcept { return ws_; }
  Workspace& workspace() noexcept { return ws_; }
  const AppRegistry& registry() const noexcept { return registry_; }
  const PolicyProfile& profile() const noexcept { return engine_.profile(); }
  const PermissionEngine& engine() const noexcept { return engine_; }
  World world() const { return World{ws_, registry_}; }

  SimTime now() const noexcept { return now_; }
  // Advances the clock second by second through (now, until]: scripted
  // actions, due scheduled messages, then up to 5 unfurl resolutions.
  void tick(SimTime until);
  void at(SimTime time, std::function<void(Platform&)> action);

  // --- lifecycle ---
  Result<AppId> install_app(const Manifest& manifest, const UserId& installer);
  void set_behavior(const AppId& app, std::unique_ptr<AppBehavior> behavior);
  AppBehavior* behavior(const AppId& app) const;
  Result<RemovalReport> uninstall_app(const AppId& app);
  // Delegated grant carrying exactly `scopes` (defaults to the manifest's
  // user or graph scopes). `decline` scripts the user refusing.
  Result<GrantId> authorize_user_delegation(const AppId& app, const UserId& user,
                                            std::optional<ScopeSet> scopes = std::nullopt,
                                            bool decline = false);
  std::optional<GrantId> bot_grant(const AppId& app) const;
  const TokenGrant* grant(GrantId id) const { return registry_.find_grant(id); }

  // --- app API (token-gated) ---
  Result<PostedMessage> post_message(GrantId token, const PostTarget& target,
                                     const std::string& text, const PostOptions& options = {});
  Status delete_message(GrantId token, const ChannelId& channel, const MessageId& id);
  Result<ScheduledId> schedule_message(GrantId token, const PostTarget& target,
                                       const std::string& text, SimTime fire_at);
  Result<std::vector<Message>> read_history(GrantId token, const ChannelId& channel,
                                            std::size_t limit = 0);
  Result<Message> read_message(GrantId token, const ChannelId& channel, const MessageId& id);
  Result<ChannelMetadata> read_channel_metadata(GrantId token, const ChannelId& channel);
  Result<FileId> upload_file(GrantId token, const PostTarget& target, const std::string& name,
                             const std::string& content);

  Status add_saved(GrantId token, SavedKind kind, const ChannelId& channel, const MessageId& id,
                   const std::string& emoji = {});
  Status remove_saved(GrantId token, SavedKind kind, const ChannelId& channel,
                      const MessageId& id, const std::string& emoji = {});
  Result<std::vector<SavedEntry>> list_saved(GrantId token, SavedKind kind);

  Result<std::string> register_command(const AppId& app, const std::string& name);
  Result<std::string> rename_command(const AppId& app, const std::string& old_name,
                                     const std::string& new_name);
  Result<std::string> register_unfurl_domain(const AppId& app, const std::string& domain);
  Result<PostedMessage> respond_to_command(GrantId token, InvocationId invocation,
                                           const std::string& text,
                                           const PostOptions& options = {});

  // --- user client path (not mediated) ---
  Result<PostedMessage> user_post(const UserId& user, const PostTarget& target,
                                  const std::string& text);
  Status user_save_draft(const UserId& user, const ChannelId& channel);
  Result<FileId> user_upload(const UserId& user, const ChannelId& channel,
                             const std::string& name, const std::string& content);
  Status user_add_saved(const UserId& user, SavedKind kind, const ChannelId& channel,
                        const MessageId& id, const std::string& emoji = {});
  Result<InvocationResult> invoke_command(const UserId& user, const std::string& name,
                                          const ChannelId& channel, const std::string& text = {});
  // Scripted answer to a collision confirmation prompt.
  void script_confirmation(const UserId& user, const std::string& name, bool accept);

  // --- logs ---
  void set_trace_label(std::string label) { trace_label_ = std::move(label); }
  const std::vector<MediationTrace>& traces() const noexcept { return traces_; }
  const std::vector<EventRecord>& events() const noexcept { return events_; }
  const std::vector<UnfurlRecord>& unfurl_log() const noexcept { return unfurls_; }
  const std::vector<ScheduledMessage>& scheduled() const noexcept { return scheduled_; }
  std::size_t api_calls(const AppId& app) const;
  std::size_t pending_unfurls() const noexcept { return unfurl_queue_.size(); }
  const Event* find_event(EventId id) const;

  // Whether events of this kind carry the true issuer under the profile.
  bool exposes_issuer(EventKind kind) const;

 private:
  const TokenGrant* token(GrantId id);
  const MediationTrace& record(MediationTrace trace);
  Result<MediationTrace> mediate(const TokenGrant& token, Operation op, const ResourceRef& ref);
  Result<ChannelId> resolve_target(const PostTarget& target, const std::optional<UserId>& acting,
                                   const std::optional<AppId>& bot);
  DisplayAuthor display_for(const Principal& issuer) const;
  Message& post_internal(const ChannelId& channel, Principal issuer, DisplayAuthor display,
                         const std::string& text, PostAction action,
                         std::vector<FileId> files = {}, bool emit_event = true);
  std::vector<Attachment> visible_attachments(const TokenGrant& token, const Message& message);
  Result<FileId> upload_internal(const ChannelId& channel, Principal issuer,
                                 const std::string& name, const std::string& content);
  Status add_saved_internal(Principal issuer, const UserId& owner, SavedKind kind,
                            const ChannelId& channel, const MessageId& id,
                            const std::string& emoji);
  Result<std::string> claim_name(const AppId& app, const std::string& name, Operation op,
                                 std::uint64_t* seq_out);
  std::string alias_for(const std::string& name, bool domain) const;
  void erase_app(const AppId& app);

  void emit(Event event);
  void deliver(const Event& event, std::vector<AppId>& delivered);
  bool app_sees(const AppId& app, const Event& event) const;
  void resolve_unfurl(const UnfurlJob& job);
  void fire_due_scheduled();
  void run_due_actions();
  std::optional<SimTime> next_due() const;

  Workspace ws_;
  AppRegistry registry_;
  PermissionEngine engine_;
  SimTime now_;

  std::map<AppId, std::unique_ptr<AppBehavior>> behaviors_;
  std::map<AppId, std::size_t> api_calls_;
  std::vector<MediationTrace> traces_;
  std::string trace_label_ = "run";
  std::vector<EventRecord> events_;
  std::uint64_t event_seq_ = 0;
  int delivery_depth_ = 0;
  std::vector<Event> deferred_events_;
  UnfurlQueue unfurl_queue_;
  std::vector<UnfurlRecord> unfurls_;
  std::vector<ScheduledMessage> scheduled_;
  std::multimap<SimTime, std::function<void(Platform&)>> actions_;
  std::map<std::pair<UserId, std::string>, bool> confirmations_;
  std::uint64_t invocation_seq_ = 0;
};

inline constexpr int kMaxDeliveryDepth = 8;

}  // namespace bcpsim
