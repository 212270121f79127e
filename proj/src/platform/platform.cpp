#include "bcpsim/platform/platform.hpp"

#include <algorithm>

#include "bcpsim/core/url.hpp"

namespace bcpsim {

std::size_t RemovalReport::residual_count() const {
  std::size_t n = residual_grants.size();
  for (const auto& p : pending_scheduled) n += p.will_fire ? 1 : 0;
  return n;
}

Platform::Platform(Workspace workspace, PolicyProfile profile, SimTime start)
    : ws_(std::move(workspace)), engine_(std::move(profile)), now_(start) {}

Result<std::unique_ptr<Platform>> Platform::from_bootstrap(const Bootstrap& bootstrap,
                                                           PolicyProfile profile,
                                                           std::uint64_t seed,
                                                           const BehaviorFactory& factory,
                                                           std::string trace_label) {
  auto ws = build_workspace(bootstrap, seed);
  if (!ws) return ws.error();
  const PlatformKind kind = profile.platform;
  auto platform = std::make_unique<Platform>(std::move(ws).value(), std::move(profile),
                                             bootstrap.start_time);
  platform->set_trace_label(std::move(trace_label));
  for (const auto& app : bootstrap.apps) {
    if (app.manifest.platform != kind) continue;
    const User* installer = platform->ws_.user_by_name(app.installed_by);
    if (!installer) {
      return make_error(Errc::invalid_argument,
                        "app " + app.manifest.name + " installed by unknown user " +
                            app.installed_by);
    }
    auto id = platform->install_app(app.manifest, installer->id);
    if (!id) return id.error();
    for (const auto& name : app.channels) {
      const Channel* ch = platform->ws_.channel_by_name(name);
      if (!ch) {
        return make_error(Errc::invalid_argument,
                          "app " + app.manifest.name + " joins unknown channel " + name);
      }
      platform->ws_.add_bot(ch->id, *id);
    }
    if (factory && !app.behavior.empty()) {
      auto behavior = factory(app, *platform);
      if (!behavior) {
        return make_error(Errc::invalid_argument, "unknown app behavior \"" + app.behavior + "\"");
      }
      platform->set_behavior(*id, std::move(behavior));
    }
  }
  return platform;
}

// ---------------------------------------------------------------- clock

void Platform::at(SimTime time, std::function<void(Platform&)> action) {
  actions_.emplace(time, std::move(action));
}

std::optional<SimTime> Platform::next_due() const {
  std::optional<SimTime> due;
  if (!actions_.empty()) due = actions_.begin()->first;
  for (const auto& s : scheduled_) {
    if (!s.done && (!due || s.fire_at < *due)) due = s.fire_at;
  }
  return due;
}

void Platform::run_due_actions() {
  while (!actions_.empty() && actions_.begin()->first <= now_) {
    auto node = actions_.extract(actions_.begin());
    node.mapped()(*this);
  }
}

void Platform::tick(SimTime until) {
  while (now_ < until) {
    SimTime next = now_ + 1;
    if (unfurl_queue_.empty()) {
      // Nothing rate-limited is pending: jump straight to the next due item.
      auto due = next_due();
      next = std::max(next, std::min(due.value_or(until), until));
    }
    now_ = next;
    run_due_actions();
    fire_due_scheduled();
    for (const auto& job : unfurl_queue_.take_for_second()) resolve_unfurl(job);
  }
}

// ---------------------------------------------------------------- helpers

const TokenGrant* Platform::token(GrantId id) {
  const TokenGrant* g = registry_.find_grant(id);
  if (g) ++api_calls_[g->app];
  return g;
}

std::size_t Platform::api_calls(const AppId& app) const {
  auto it = api_calls_.find(app);
  return it == api_calls_.end() ? 0 : it->second;
}

const MediationTrace& Platform::record(MediationTrace trace) {
  trace.seq = traces_.size() + 1;
  trace.label = trace_label_ + "#" + std::to_string(trace.seq);
  trace.at = now_;
  traces_.push_back(std::move(trace));
  return traces_.back();
}

Result<MediationTrace> Platform::mediate(const TokenGrant& token, Operation op,
                                         const ResourceRef& ref) {
  const MediationTrace& t = record(engine_.check(token, op, ref, world()));
  if (!t.allow) return denial_error(t);
  return t;
}

namespace {

Error unknown_grant() { return make_error(Errc::unknown_app, "unknown token"); }

}  // namespace

Result<ChannelId> Platform::resolve_target(const PostTarget& target,
                                           const std::optional<UserId>& acting,
                                           const std::optional<AppId>& bot) {
  if (const auto* id = std::get_if<ChannelId>(&target)) {
    if (!ws_.find_channel(*id)) return make_error(Errc::unknown_target, "no channel " + id->str());
    return *id;
  }
  if (const auto* name = std::get_if<ChannelName>(&target)) {
    const Channel* ch = ws_.channel_by_name(name->name);
    if (!ch) return make_error(Errc::unknown_target, "no channel named " + name->name);
    return ch->id;
  }
  if (const auto* user = std::get_if<UserId>(&target)) {
    if (!ws_.find_user(*user)) return make_error(Errc::unknown_target, "no user " + user->str());
    if (acting) return ws_.direct_channel(*acting, *user);
    if (bot) return ws_.direct_channel(*user, *bot);
    return make_error(Errc::unknown_target, "direct message needs an acting user");
  }
  const auto& app = std::get<AppId>(target);
  if (!registry_.find_app(app) || !acting) {
    return make_error(Errc::unknown_target, "no app bot " + app.str());
  }
  return ws_.direct_channel(*acting, app);
}

DisplayAuthor Platform::display_for(const Principal& issuer) const {
  if (auto user = display_user(issuer)) {
    const User* u = ws_.find_user(*user);
    return DisplayAuthor{false, user->str(), u ? u->name : user->str(), {}};
  }
  const AppId app = *issuing_app(issuer);
  const InstalledApp* a = registry_.find_app(app);
  return DisplayAuthor{true, app.str(), a ? a->manifest.name : app.str(),
                       a ? a->manifest.icon : std::string{}};
}

bool Platform::exposes_issuer(EventKind kind) const {
  if (profile().has(Countermeasure::issuer_identity)) return true;
  return profile().slack() && kind == EventKind::message_posted;
}

Message& Platform::post_internal(const ChannelId& channel, Principal issuer,
                                 DisplayAuthor display, const std::string& text,
                                 PostAction action, std::vector<FileId> files, bool emit_event) {
  Message m;
  m.channel = channel;
  m.id = ws_.next_message_id(channel, action, now_);
  m.issuer = issuer;
  m.display = display;
  m.text = text.substr(0, kMaxMessageChars);
  m.action = action;
  m.file_refs = std::move(files);
  Message& stored = ws_.add_message(std::move(m));
  for (auto& url : extract_urls(stored.text)) {
    unfurl_queue_.push(channel, stored.id, std::move(url), now_);
  }
  if (emit_event) {
    Event e;
    e.kind = EventKind::message_posted;
    e.channel = channel;
    e.message = stored.id;
    e.display = display;
    e.display_user = display_user(issuer);
    if (exposes_issuer(e.kind)) e.issuer = issuer;
    e.text = stored.text;
    emit(std::move(e));
  }
  return stored;
}

std::vector<Attachment> Platform::visible_attachments(const TokenGrant& token,
                                                      const Message& message) {
  std::vector<Attachment> out;
  for (const auto& a : message.attachments) {
    ResourceRef ref;
    ref.channel = message.channel;
    ref.message = message.id;
    ref.origin = a.origin;
    if (record(engine_.check(token, Operation::read_attachment, ref, world())).allow) {
      out.push_back(a);
    }
  }
  return out;
}

// ---------------------------------------------------------------- lifecycle

Result<AppId> Platform::install_app(const Manifest& manifest, const UserId& installer) {
  if (manifest.name.empty()) return make_error(Errc::malformed_manifest, "app name is empty");
  if (manifest.platform != profile().platform) {
    return make_error(Errc::malformed_manifest, "manifest targets " +
                                                    std::string(to_string(manifest.platform)) +
                                                    " but the platform is " +
                                                    std::string(to_string(profile().platform)));
  }
  if (!ws_.find_user(installer)) return make_error(Errc::unknown_target, "unknown installer");
  ScopeSet scopes = known_scopes(manifest.bot_scopes);
  for (Scope s : known_scopes(manifest.capabilities)) scopes.insert(s);
  for (Scope s : scopes) {
    if (!scope_available(s, profile())) {
      return make_error(Errc::malformed_manifest, "scope " + std::string(scope_name(s)) +
                                                      " does not exist under " +
                                                      profile().describe());
    }
  }

  AppId id(ws_.next_id('A'));
  while (registry_.find_app(id)) id = AppId(ws_.next_id('A'));
  InstalledApp& app = registry_.add_app(id, manifest, installer);
  app.bot_grant = registry_.add_grant(id, TokenKind::bot, std::nullopt, scopes).id;

  for (const auto& command : manifest.commands) {
    auto r = register_command(id, command);
    if (!r) {
      erase_app(id);
      return r.error();
    }
  }
  for (const auto& domain : manifest.unfurl_domains) {
    auto r = register_unfurl_domain(id, domain);
    if (!r) {
      erase_app(id);
      return r.error();
    }
  }
  return id;
}

void Platform::erase_app(const AppId& app) {
  registry_.erase_app(app);
  behaviors_.erase(app);
}

void Platform::set_behavior(const AppId& app, std::unique_ptr<AppBehavior> behavior) {
  behaviors_[app] = std::move(behavior);
}

AppBehavior* Platform::behavior(const AppId& app) const {
  auto it = behaviors_.find(app);
  return it == behaviors_.end() ? nullptr : it->second.get();
}

Result<RemovalReport> Platform::uninstall_app(const AppId& id) {
  InstalledApp* app = registry_.find_app(id);
  if (!app || !app->installed) return make_error(Errc::unknown_app, "app not installed");
  app->installed = false;
  for (const auto& [cid, ch] : ws_.channels()) {
    if (ch.has_bot(id)) ws_.find_channel(cid)->bots.erase(id);
  }

  const bool full = profile().has(Countermeasure::full_revocation);
  RemovalReport report;
  report.app = id;
  for (TokenGrant* g : registry_.grants_of(id)) {
    const bool revoke = full || g->kind == TokenKind::bot || profile().slack();
    if (revoke) {
      g->revoked = true;
      report.revoked.push_back(g->id);
    } else if (!g->revoked) {
      report.residual_grants.push_back(g->id);
    }
  }
  for (auto& s : scheduled_) {
    if (s.app != id || s.done) continue;
    // Left pending: under full revocation the firing check denies it.
    report.pending_scheduled.push_back({s.id, s.fire_at, !full});
  }
  return report;
}

Result<GrantId> Platform::authorize_user_delegation(const AppId& app_id, const UserId& user,
                                                    std::optional<ScopeSet> scopes,
                                                    bool decline) {
  const InstalledApp* app = registry_.find_app(app_id);
  if (!app) return make_error(Errc::unknown_app, "unknown app " + app_id.str());
  // Graph authorization lives in a separate trust domain and does not need
  // a live install; the workspace OAuth flow does.
  if (profile().slack() && !app->installed) {
    return make_error(Errc::unknown_app, "app is not installed");
  }
  if (!ws_.find_user(user)) return make_error(Errc::unknown_target, "unknown user");
  if (decline) return make_error(Errc::user_declined, "user declined the permission request");
  const TokenKind kind = profile().slack() ? TokenKind::user_delegate : TokenKind::graph_delegate;
  ScopeSet requested;
  if (scopes) {
    requested = *scopes;
  } else {
    requested = known_scopes(profile().slack() ? app->manifest.user_scopes
                                               : app->manifest.graph_scopes);
  }
  for (Scope s : requested) {
    if (!scope_available(s, profile())) {
      return make_error(Errc::invalid_argument, "scope " + std::string(scope_name(s)) +
                                                    " does not exist under " +
                                                    profile().describe());
    }
  }
  return registry_.add_grant(app_id, kind, user, std::move(requested)).id;
}

std::optional<GrantId> Platform::bot_grant(const AppId& app) const {
  const InstalledApp* a = registry_.find_app(app);
  if (!a) return std::nullopt;
  return a->bot_grant;
}

// ---------------------------------------------------------------- messaging

Result<PostedMessage> Platform::post_message(GrantId token_id, const PostTarget& target,
                                             const std::string& text,
                                             const PostOptions& options) {
  const TokenGrant* tok = token(token_id);
  if (!tok) return unknown_grant();
  if (text.size() > kMaxMessageChars) {
    return make_error(Errc::invalid_argument, "message longer than 40000 characters");
  }
  const std::optional<AppId> bot =
      tok->kind == TokenKind::bot ? std::optional<AppId>(tok->app) : std::nullopt;
  auto channel = resolve_target(target, tok->user, bot);
  if (!channel) return channel.error();
  ResourceRef ref;
  ref.channel = *channel;
  if (options.display_name || options.display_icon) {
    if (auto t = mediate(*tok, Operation::customize_display, ref); !t) return t.error();
  }
  if (auto t = mediate(*tok, Operation::post_message, ref); !t) return t.error();
  const Principal issuer = tok->principal();
  DisplayAuthor display = display_for(issuer);
  if (options.display_name) display.name = *options.display_name;
  if (options.display_icon) display.icon = *options.display_icon;
  const Message& m = post_internal(*channel, issuer, display, text, PostAction::app_text);
  return PostedMessage{m.channel, m.id};
}

Status Platform::delete_message(GrantId token_id, const ChannelId& channel, const MessageId& id) {
  const TokenGrant* tok = token(token_id);
  if (!tok) return unknown_grant();
  Message* m = ws_.find_message(channel, id);
  if (!m || m->deleted) return make_error(Errc::unknown_message, "no message " + id.str());
  ResourceRef ref;
  ref.channel = channel;
  ref.message = id;
  ref.creation = m->action;
  if (auto t = mediate(*tok, Operation::delete_message, ref); !t) return t.error();
  m->deleted = true;
  return ok_status();
}

Result<ScheduledId> Platform::schedule_message(GrantId token_id, const PostTarget& target,
                                               const std::string& text, SimTime fire_at) {
  const TokenGrant* tok = token(token_id);
  if (!tok) return unknown_grant();
  if (profile().teams()) return make_error(Errc::unsupported, "no message scheduling on teams");
  if (fire_at <= now_) return make_error(Errc::invalid_argument, "fire time is not in the future");
  const std::optional<AppId> bot =
      tok->kind == TokenKind::bot ? std::optional<AppId>(tok->app) : std::nullopt;
  auto channel = resolve_target(target, tok->user, bot);
  if (!channel) return channel.error();
  ResourceRef ref;
  ref.channel = *channel;
  if (auto t = mediate(*tok, Operation::schedule_message, ref); !t) return t.error();
  ScheduledMessage s;
  s.id = ScheduledId{scheduled_.size() + 1};
  s.grant = tok->id;
  s.app = tok->app;
  s.channel = *channel;
  s.text = text;
  s.fire_at = fire_at;
  scheduled_.push_back(s);
  return s.id;
}

void Platform::fire_due_scheduled() {
  for (std::size_t i = 0; i < scheduled_.size(); ++i) {
    if (scheduled_[i].done || scheduled_[i].fire_at > now_) continue;
    scheduled_[i].done = true;
    const ScheduledMessage s = scheduled_[i];
    const TokenGrant* tok = registry_.find_grant(s.grant);
    if (!tok) continue;
    ResourceRef ref;
    ref.channel = s.channel;
    if (!mediate(*tok, Operation::fire_scheduled, ref)) continue;
    scheduled_[i].fired = true;
    const Principal issuer = tok->principal();
    post_internal(s.channel, issuer, display_for(issuer), s.text, PostAction::app_text);
  }
}

Result<std::vector<Message>> Platform::read_history(GrantId token_id, const ChannelId& channel,
                                                    std::size_t limit) {
  const TokenGrant* tok = token(token_id);
  if (!tok) return unknown_grant();
  if (!ws_.find_channel(channel)) return make_error(Errc::unknown_target, "no such channel");
  ResourceRef ref;
  ref.channel = channel;
  if (auto t = mediate(*tok, Operation::read_history, ref); !t) return t.error();
  const bool per_message = engine_.check(*tok, Operation::read_history, ref, world()).rule ==
                           RuntimeRule::app_mention;
  auto all = ws_.history(channel);
  if (limit > 0 && all.size() > limit) all.erase(all.begin(), all.end() - limit);
  std::vector<Message> out;
  for (const Message* m : all) {
    if (per_message) {
      ResourceRef mref = ref;
      mref.message = m->id;
      if (!record(engine_.check(*tok, Operation::read_message, mref, world())).allow) continue;
    }
    Message copy = *m;
    copy.attachments = visible_attachments(*tok, *m);
    out.push_back(std::move(copy));
  }
  return out;
}

Result<Message> Platform::read_message(GrantId token_id, const ChannelId& channel,
                                       const MessageId& id) {
  const TokenGrant* tok = token(token_id);
  if (!tok) return unknown_grant();
  const Message* m = ws_.find_message(channel, id);
  if (!m || m->deleted) return make_error(Errc::unknown_message, "no message " + id.str());
  ResourceRef ref;
  ref.channel = channel;
  ref.message = id;
  if (auto t = mediate(*tok, Operation::read_message, ref); !t) return t.error();
  Message copy = *m;
  copy.attachments = visible_attachments(*tok, *m);
  return copy;
}

Result<ChannelMetadata> Platform::read_channel_metadata(GrantId token_id,
                                                        const ChannelId& channel) {
  const TokenGrant* tok = token(token_id);
  if (!tok) return unknown_grant();
  const Channel* ch = ws_.find_channel(channel);
  if (!ch) return make_error(Errc::unknown_target, "no such channel");
  ResourceRef ref;
  ref.channel = channel;
  if (auto t = mediate(*tok, Operation::read_metadata, ref); !t) return t.error();
  return ChannelMetadata{ch->id, ch->name, ch->kind, ws_.latest_message_id(channel)};
}

// ---------------------------------------------------------------- files

Result<FileId> Platform::upload_internal(const ChannelId& channel, Principal issuer,
                                         const std::string& name, const std::string& content) {
  File f;
  f.id = ws_.next_file_id();
  f.uploader = issuer;
  f.owner = display_user(issuer).value_or(UserId{});
  f.name = name;
  f.content = content;
  const UserId uploader_segment = f.owner.empty() ? UserId(issuing_app(issuer)->str()) : f.owner;
  f.public_url = format_file_url(ws_.name(), uploader_segment, f.id);
  f.shared_in.insert(channel);
  const FileId id = f.id;
  const std::string text = name + " " + f.public_url;
  ws_.add_file(std::move(f));
  const DisplayAuthor display = display_for(issuer);
  const Message& m =
      post_internal(channel, issuer, display, text, PostAction::file_only, {id}, false);
  Event e;
  e.kind = EventKind::file_shared;
  e.channel = channel;
  e.message = m.id;
  e.display = display;
  e.display_user = display_user(issuer);
  if (exposes_issuer(e.kind)) e.issuer = issuer;
  e.text = name;
  e.file = id;
  emit(std::move(e));
  return id;
}

Result<FileId> Platform::upload_file(GrantId token_id, const PostTarget& target,
                                     const std::string& name, const std::string& content) {
  const TokenGrant* tok = token(token_id);
  if (!tok) return unknown_grant();
  const std::optional<AppId> bot =
      tok->kind == TokenKind::bot ? std::optional<AppId>(tok->app) : std::nullopt;
  auto channel = resolve_target(target, tok->user, bot);
  if (!channel) return channel.error();
  ResourceRef ref;
  ref.channel = *channel;
  if (auto t = mediate(*tok, Operation::upload_file, ref); !t) return t.error();
  return upload_internal(*channel, tok->principal(), name, content);
}

// ---------------------------------------------------------------- saved items

Status Platform::add_saved_internal(Principal issuer, const UserId& owner, SavedKind kind,
                                    const ChannelId& channel, const MessageId& id,
                                    const std::string& emoji) {
  const Message* m = ws_.find_message(channel, id);
  if (!m || m->deleted) return make_error(Errc::unknown_message, "no message " + id.str());
  SavedItem item{kind, channel, id, issuer, owner, kind == SavedKind::reaction ? emoji : ""};
  auto& items = ws_.saved_items();
  const bool present = std::any_of(items.begin(), items.end(), [&](const SavedItem& s) {
    return s.kind == item.kind && s.channel == item.channel && s.message == item.message &&
           s.owner == item.owner && s.emoji == item.emoji;
  });
  if (!present) items.push_back(item);
  if (kind == SavedKind::reaction && !present) {
    Event e;
    e.kind = EventKind::reaction_added;
    e.channel = channel;
    e.message = id;
    e.display = display_for(issuer);
    e.display_user = display_user(issuer);
    if (exposes_issuer(e.kind)) e.issuer = issuer;
    e.emoji = emoji;
    emit(std::move(e));
  }
  return ok_status();
}

Status Platform::add_saved(GrantId token_id, SavedKind kind, const ChannelId& channel,
                           const MessageId& id, const std::string& emoji) {
  const TokenGrant* tok = token(token_id);
  if (!tok) return unknown_grant();
  if (!tok->user) return make_error(Errc::unsupported, "saved items need a delegated token");
  ResourceRef ref;
  ref.channel = channel;
  ref.message = id;
  ref.saved = kind;
  if (!ws_.find_channel(channel)) return make_error(Errc::unknown_message, "no such channel");
  if (auto t = mediate(*tok, Operation::add_saved, ref); !t) return t.error();
  return add_saved_internal(tok->principal(), *tok->user, kind, channel, id, emoji);
}

Status Platform::remove_saved(GrantId token_id, SavedKind kind, const ChannelId& channel,
                              const MessageId& id, const std::string& emoji) {
  const TokenGrant* tok = token(token_id);
  if (!tok) return unknown_grant();
  if (!tok->user) return make_error(Errc::unsupported, "saved items need a delegated token");
  ResourceRef ref;
  ref.channel = channel;
  ref.message = id;
  ref.saved = kind;
  if (!ws_.find_channel(channel)) return make_error(Errc::unknown_message, "no such channel");
  if (auto t = mediate(*tok, Operation::remove_saved, ref); !t) return t.error();
  auto& items = ws_.saved_items();
  const std::string key_emoji = kind == SavedKind::reaction ? emoji : "";
  auto it = std::find_if(items.begin(), items.end(), [&](const SavedItem& s) {
    return s.kind == kind && s.channel == channel && s.message == id && s.owner == *tok->user &&
           s.emoji == key_emoji;
  });
  if (it == items.end()) return make_error(Errc::unknown_message, "nothing to remove");
  items.erase(it);
  return ok_status();
}

Result<std::vector<SavedEntry>> Platform::list_saved(GrantId token_id, SavedKind kind) {
  const TokenGrant* tok = token(token_id);
  if (!tok) return unknown_grant();
  if (!tok->user) return make_error(Errc::unsupported, "saved items need a delegated token");
  ResourceRef ref;
  ref.saved = kind;
  if (auto t = mediate(*tok, Operation::list_saved, ref); !t) return t.error();
  std::vector<SavedEntry> out;
  const std::vector<SavedItem> items = ws_.saved_items();
  for (const auto& item : items) {
    if (item.kind != kind || item.owner != *tok->user) continue;
    SavedEntry entry{item.kind, item.channel, item.message, item.emoji, std::nullopt};
    ResourceRef cref;
    cref.channel = item.channel;
    cref.message = item.message;
    cref.saved = kind;
    cref.entry_issuer = item.issuer;
    const Message* m = ws_.find_message(item.channel, item.message);
    if (m && !m->deleted &&
        record(engine_.check(*tok, Operation::read_saved_content, cref, world())).allow) {
      entry.content = m->text;
    }
    out.push_back(std::move(entry));
  }
  return out;
}

// ---------------------------------------------------------------- namespaces

std::string Platform::alias_for(const std::string& name, bool domain) const {
  for (int n = 2;; ++n) {
    std::string candidate = name + "-" + std::to_string(n);
    const bool taken = domain ? registry_.domain_taken(candidate, AppId{})
                              : registry_.command_taken(candidate, AppId{});
    if (!taken) return candidate;
  }
}

Result<std::string> Platform::claim_name(const AppId& app, const std::string& name,
                                         Operation op, std::uint64_t* seq_out) {
  const InstalledApp* a = registry_.find_app(app);
  if (!a || !a->installed) return make_error(Errc::unknown_app, "app not installed");
  const TokenGrant* tok = token(a->bot_grant);
  if (!tok) return unknown_grant();
  ResourceRef ref;
  ref.name = name;
  if (auto t = mediate(*tok, op, ref); !t) return t.error();
  const bool domain = op == Operation::register_unfurl_domain;
  const bool taken =
      domain ? registry_.domain_taken(name, app) : registry_.command_taken(name, app);
  std::string final_name = name;
  if (taken && profile().has(Countermeasure::collision_guard) &&
      profile().collision_mode == CollisionMode::alias) {
    final_name = alias_for(name, domain);
  }
  *seq_out = registry_.next_seq();
  return final_name;
}

Result<std::string> Platform::register_command(const AppId& app, const std::string& name) {
  if (name.size() < 2 || name.front() != '/') {
    return make_error(Errc::invalid_argument, "command must start with '/'");
  }
  std::uint64_t seq = 0;
  auto final_name = claim_name(app, name, Operation::register_command, &seq);
  if (!final_name) return final_name.error();
  registry_.add_command(CommandRegistration{*final_name, name, app, seq});
  return final_name;
}

Result<std::string> Platform::rename_command(const AppId& app, const std::string& old_name,
                                             const std::string& new_name) {
  auto& commands = registry_.commands();
  auto it = std::find_if(commands.begin(), commands.end(), [&](const CommandRegistration& r) {
    return r.owner == app && r.name == old_name;
  });
  if (it == commands.end()) {
    return make_error(Errc::unknown_command, "app does not own " + old_name);
  }
  const std::size_t index = static_cast<std::size_t>(it - commands.begin());
  std::uint64_t seq = 0;
  auto final_name = claim_name(app, new_name, Operation::rename_command, &seq);
  if (!final_name) return final_name.error();
  CommandRegistration& reg = registry_.commands()[index];
  reg.name = *final_name;
  reg.requested = new_name;
  reg.install_seq = seq;
  return final_name;
}

Result<std::string> Platform::register_unfurl_domain(const AppId& app, const std::string& domain) {
  std::uint64_t seq = 0;
  auto final_name = claim_name(app, domain, Operation::register_unfurl_domain, &seq);
  if (!final_name) return final_name.error();
  registry_.add_domain(DomainRegistration{*final_name, app, seq});
  return final_name;
}

void Platform::script_confirmation(const UserId& user, const std::string& name, bool accept) {
  confirmations_[{user, name}] = accept;
}

Result<InvocationResult> Platform::invoke_command(const UserId& user, const std::string& name,
                                                  const ChannelId& channel,
                                                  const std::string& text) {
  const Channel* ch = ws_.find_channel(channel);
  if (!ch) return make_error(Errc::unknown_target, "no such channel");
  if (!ws_.find_user(user)) return make_error(Errc::unknown_target, "no such user");
  if (!ws_.user_can_access(user, *ch)) {
    return make_denial(DenialReason::not_in_channel, "user cannot access the channel",
                       std::nullopt);
  }
  auto owners = registry_.command_owners(name);
  if (owners.empty()) return make_error(Errc::unknown_command, "no command " + name);
  const CommandRegistration* winner = owners.front();
  if (owners.size() > 1 && profile().has(Countermeasure::collision_guard) &&
      profile().collision_mode == CollisionMode::prompt) {
    auto it = confirmations_.find({user, name});
    if (it == confirmations_.end()) {
      return make_denial(DenialReason::confirmation_required,
                         "several apps claim " + name + "; the user did not confirm",
                         std::nullopt);
    }
    if (!it->second) winner = owners.back();
  }
  CommandInvocation inv;
  inv.id = InvocationId{++invocation_seq_};
  inv.app = winner->owner;
  inv.channel = channel;
  inv.user = user;
  inv.command = name;
  inv.text = text;
  inv.at = now_;
  ws_.add_invocation(inv);

  Event e;
  e.kind = EventKind::command_invoked;
  e.channel = channel;
  const Principal issuer = UserPrincipal{user};
  e.display = display_for(issuer);
  e.display_user = user;
  if (exposes_issuer(e.kind)) e.issuer = issuer;
  e.text = text;
  e.command = name;
  e.invocation = inv.id;
  e.target_app = winner->owner;
  emit(std::move(e));
  return InvocationResult{inv.id, winner->owner, winner->name};
}

Result<PostedMessage> Platform::respond_to_command(GrantId token_id, InvocationId invocation,
                                                   const std::string& text,
                                                   const PostOptions& options) {
  const TokenGrant* tok = token(token_id);
  if (!tok) return unknown_grant();
  const CommandInvocation* inv = ws_.find_invocation(invocation);
  if (!inv) return make_error(Errc::unknown_target, "no such invocation");
  const ChannelId channel = inv->channel;
  ResourceRef ref;
  ref.invocation = invocation;
  ref.channel = channel;
  if (options.display_name || options.display_icon) {
    if (auto t = mediate(*tok, Operation::customize_display, ref); !t) return t.error();
  }
  if (auto t = mediate(*tok, Operation::respond_to_command, ref); !t) return t.error();
  const Principal issuer = tok->principal();
  DisplayAuthor display = display_for(issuer);
  if (options.display_name) display.name = *options.display_name;
  if (options.display_icon) display.icon = *options.display_icon;
  const Message& m = post_internal(channel, issuer, display, text, PostAction::app_text);
  return PostedMessage{m.channel, m.id};
}

// ---------------------------------------------------------------- client path

Result<PostedMessage> Platform::user_post(const UserId& user, const PostTarget& target,
                                          const std::string& text) {
  if (!ws_.find_user(user)) return make_error(Errc::unknown_target, "no such user");
  auto channel = resolve_target(target, user, std::nullopt);
  if (!channel) return channel.error();
  if (!ws_.user_can_access(user, *ws_.find_channel(*channel))) {
    return make_denial(DenialReason::not_in_channel, "user cannot access the channel",
                       std::nullopt);
  }
  const Principal issuer = UserPrincipal{user};
  const Message& m = post_internal(*channel, issuer, display_for(issuer), text,
                                   PostAction::user_text);
  return PostedMessage{m.channel, m.id};
}

Status Platform::user_save_draft(const UserId& user, const ChannelId& channel) {
  const Channel* ch = ws_.find_channel(channel);
  if (!ch) return make_error(Errc::unknown_target, "no such channel");
  if (!ws_.user_can_access(user, *ch)) {
    return make_denial(DenialReason::not_in_channel, "user cannot access the channel",
                       std::nullopt);
  }
  ws_.next_message_id(channel, PostAction::draft_save, now_);
  return ok_status();
}

Result<FileId> Platform::user_upload(const UserId& user, const ChannelId& channel,
                                     const std::string& name, const std::string& content) {
  const Channel* ch = ws_.find_channel(channel);
  if (!ch) return make_error(Errc::unknown_target, "no such channel");
  if (!ws_.find_user(user) || !ws_.user_can_access(user, *ch)) {
    return make_denial(DenialReason::not_in_channel, "user cannot access the channel",
                       std::nullopt);
  }
  return upload_internal(channel, UserPrincipal{user}, name, content);
}

Status Platform::user_add_saved(const UserId& user, SavedKind kind, const ChannelId& channel,
                                const MessageId& id, const std::string& emoji) {
  if (!ws_.find_user(user)) return make_error(Errc::unknown_target, "no such user");
  return add_saved_internal(UserPrincipal{user}, user, kind, channel, id, emoji);
}

// ---------------------------------------------------------------- events

const Event* Platform::find_event(EventId id) const {
  if (id.value == 0 || id.value > events_.size()) return nullptr;
  return &events_[id.value - 1].event;
}

bool Platform::app_sees(const AppId& app, const Event& event) const {
  const InstalledApp* a = registry_.find_app(app);
  if (!a || !a->installed) return false;
  if (event.kind == EventKind::command_invoked) return event.target_app == app;
  if (!a->manifest.subscribes(subscription_name(event.kind))) return false;
  if (event.kind == EventKind::file_shared) return true;
  if (!event.message) return false;
  if (event.kind == EventKind::message_posted) {
    const Message* m = ws_.find_message(event.channel, *event.message);
    if (m && m->issuer == Principal{AppBotPrincipal{app}}) return false;
  }
  const TokenGrant* tok = registry_.find_grant(a->bot_grant);
  if (!tok) return false;
  ResourceRef ref;
  ref.channel = event.channel;
  ref.message = event.message;
  return engine_.check(*tok, Operation::read_message, ref, world()).allow;
}

void Platform::deliver(const Event& event, std::vector<AppId>& delivered) {
  std::vector<AppId> targets;
  for (const auto& [app, behavior] : behaviors_) {
    if (behavior && app_sees(app, event)) targets.push_back(app);
  }
  ++delivery_depth_;
  for (const auto& app : targets) {
    AppBehavior* b = behavior(app);
    if (!b) continue;
    delivered.push_back(app);
    b->on_event(event, *this, app);
  }
  --delivery_depth_;
}

void Platform::emit(Event event) {
  event.id = EventId{++event_seq_};
  event.at = now_;
  events_.push_back(EventRecord{event, {}});
  if (delivery_depth_ >= kMaxDeliveryDepth) {
    deferred_events_.push_back(std::move(event));
    return;
  }
  std::vector<AppId> delivered;
  deliver(event, delivered);
  events_[event.id.value - 1].delivered_to = std::move(delivered);
  if (delivery_depth_ == 0) {
    while (!deferred_events_.empty()) {
      Event next = std::move(deferred_events_.front());
      deferred_events_.erase(deferred_events_.begin());
      std::vector<AppId> d;
      deliver(next, d);
      events_[next.id.value - 1].delivered_to = std::move(d);
    }
  }
}

// ---------------------------------------------------------------- unfurls

void Platform::resolve_unfurl(const UnfurlJob& job) {
  UnfurlRecord rec;
  rec.job = job.seq;
  rec.enqueued_at = job.enqueued_at;
  rec.resolved_at = now_;
  rec.channel = job.channel;
  rec.message = job.message;
  rec.url = job.url;
  auto finish = [&](std::string outcome) {
    rec.outcome = std::move(outcome);
    unfurls_.push_back(std::move(rec));
  };

  Message* carrier = ws_.find_message(job.channel, job.message);
  if (!carrier || carrier->deleted) return finish("carrier deleted");
  auto target = classify_url(job.url);
  if (!target) return finish("not a link");

  // Platform unfurls of workspace links happen only in the author's own
  // personal channel and only for content the author can reach.
  auto personal_author = [&]() -> const User* {
    auto author = display_user(carrier->issuer);
    if (!author) return nullptr;
    const User* u = ws_.find_user(*author);
    return u && u->personal_channel == carrier->channel ? u : nullptr;
  };

  if (const auto* mu = std::get_if<MessageUrl>(&*target)) {
    if (!profile().slack()) return finish("no link unfurl on this platform");
    if (mu->workspace != ws_.name()) return finish("other workspace");
    const User* author = personal_author();
    if (!author) return finish("not in the author's personal channel");
    const Channel* origin_ch = ws_.find_channel(mu->channel);
    if (!origin_ch || !ws_.user_can_access(author->id, *origin_ch)) {
      return finish("author cannot access the linked channel");
    }
    const Message* origin = ws_.find_message(mu->channel, mu->message);
    if (!origin || origin->deleted) return finish("no such message");
    carrier->attachments.push_back(make_attachment(
        origin->text, origin->display.name, MessageOrigin{mu->channel, mu->message}));
    rec.renderers.push_back("platform");
    return finish("attached");
  }

  if (const auto* fu = std::get_if<FileUrl>(&*target)) {
    if (!profile().slack()) return finish("no link unfurl on this platform");
    if (fu->workspace != ws_.name()) return finish("other workspace");
    const User* author = personal_author();
    if (!author) return finish("not in the author's personal channel");
    const File* file = ws_.find_file(fu->file);
    if (!file) return finish("no such file");
    const bool reachable = std::any_of(file->shared_in.begin(), file->shared_in.end(),
                                       [&](const ChannelId& c) {
                                         const Channel* ch = ws_.find_channel(c);
                                         return ch && ws_.user_can_access(author->id, *ch);
                                       });
    if (!reachable) return finish("author cannot access the file");
    carrier->attachments.push_back(make_attachment(format_download_url(ws_.name(), file->id),
                                                   file->name, FileOrigin{file->id}));
    rec.renderers.push_back("platform");
    return finish("attached");
  }

  const auto& ext = std::get<ExternalUrl>(*target);
  auto owners = registry_.domain_owners(ext.host);
  if (owners.empty()) return finish("no registrant");
  std::vector<const DomainRegistration*> renderers;
  if (profile().slack()) {
    renderers.assign(owners.rbegin(), owners.rend());  // all, in registration order
  } else if (owners.size() > 1 && profile().has(Countermeasure::collision_guard) &&
             profile().collision_mode == CollisionMode::prompt) {
    renderers.push_back(owners.back());  // unconfirmed newcomer does not take over
  } else {
    renderers.push_back(owners.front());
  }
  for (const DomainRegistration* reg : renderers) {
    const InstalledApp* app = registry_.find_app(reg->owner);
    UnfurlCard card{app->manifest.name + " preview of " + ext.url, app->manifest.name,
                    app->manifest.icon};
    if (AppBehavior* b = behavior(reg->owner)) {
      if (auto custom = b->render_unfurl(ext.url, *this, reg->owner)) card = *custom;
    }
    Attachment a = make_attachment(card.content, card.name, ExternalOrigin{ext.url}, reg->owner);
    a.card_name = card.name;
    a.card_icon = card.icon;
    carrier->attachments.push_back(std::move(a));
    rec.renderers.push_back(reg->owner.str());
  }
  return finish("attached");
}

}  // namespace bcpsim
