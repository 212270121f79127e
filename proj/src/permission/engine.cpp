#include "bcpsim/permission/engine.hpp"

namespace bcpsim {

namespace {

bool is_delegate(const TokenGrant& token) { return token.kind != TokenKind::bot; }

Scope saved_write_scope(SavedKind kind) {
  switch (kind) {
    case SavedKind::pin: return Scope::pins_write;
    case SavedKind::star: return Scope::stars_write;
    case SavedKind::reaction: return Scope::reactions_write;
  }
  return Scope::pins_write;
}

Scope saved_read_scope(SavedKind kind) {
  switch (kind) {
    case SavedKind::pin: return Scope::pins_read;
    case SavedKind::star: return Scope::stars_read;
    case SavedKind::reaction: return Scope::reactions_read;
  }
  return Scope::pins_read;
}

bool bot_in_channel(const TokenGrant& token, const Channel& channel) {
  return channel.has_bot(token.app);
}

bool user_in_channel(const TokenGrant& token, const Channel& channel, const World& world) {
  return token.user && world.workspace.user_can_access(*token.user, channel);
}

bool mentions_app(const TokenGrant& token, const Message& message, const World& world) {
  const InstalledApp* app = world.registry.find_app(token.app);
  return app && message.text.find("@" + app->manifest.name) != std::string::npos;
}

// Operations whose Level-2 check depends on the channel a message lives in.
bool channel_scoped(Operation op) {
  switch (op) {
    case Operation::list_saved:
    case Operation::register_command:
    case Operation::rename_command:
    case Operation::register_unfurl_domain:
    case Operation::respond_to_command:
      return false;
    default:
      return true;
  }
}

}  // namespace

bool PermissionEngine::is_app_target(const Channel& channel, const AppId& self) {
  for (const auto& bot : channel.bots) {
    if (bot != self) return true;
  }
  return false;
}

std::optional<Scope> PermissionEngine::required_scope(const TokenGrant& token, Operation op,
                                                      const ResourceRef& resource,
                                                      const World& world) const {
  const Channel* channel =
      resource.channel ? world.workspace.find_channel(*resource.channel) : nullptr;
  const bool teams = profile_.teams();

  auto history_scope = [&]() -> std::optional<Scope> {
    if (teams) return is_delegate(token) ? Scope::chat_read_write : Scope::bot_commands;
    if (!channel) return std::nullopt;
    switch (channel->kind) {
      case ChannelKind::public_channel: return Scope::channels_history;
      case ChannelKind::private_channel: return Scope::groups_history;
      case ChannelKind::direct:
        return channel->users.size() + channel->bots.size() > 2 ? Scope::mpim_history
                                                                 : Scope::im_history;
      case ChannelKind::personal: return Scope::im_history;
    }
    return std::nullopt;
  };
  auto metadata_scope = [&]() -> std::optional<Scope> {
    if (teams || !channel) return history_scope();
    switch (channel->kind) {
      case ChannelKind::private_channel: return Scope::groups_read;
      case ChannelKind::public_channel: return Scope::channels_history;
      default: return Scope::im_history;
    }
  };
  auto post_scope = [&]() -> std::optional<Scope> {
    if (!is_delegate(token)) return teams ? Scope::bot_commands : Scope::chat_write;
    if (profile_.has(Countermeasure::finer_scopes)) {
      if (!channel) return Scope::chat_write_human;
      return is_app_target(*channel, token.app) ? Scope::chat_write_app : Scope::chat_write_human;
    }
    return teams ? Scope::chat_read_write : Scope::chat_write;
  };

  switch (op) {
    case Operation::read_history:
    case Operation::read_message:
    case Operation::read_attachment:
      return history_scope();
    case Operation::read_metadata:
      return metadata_scope();
    case Operation::post_message:
    case Operation::schedule_message:
    case Operation::fire_scheduled:
      return post_scope();
    case Operation::customize_display:
      return Scope::chat_write_customize;
    case Operation::delete_message:
      if (resource.creation == PostAction::file_only) return Scope::files_write;
      return post_scope();
    case Operation::upload_file:
      return Scope::files_write;
    case Operation::add_saved:
    case Operation::remove_saved:
      return saved_write_scope(resource.saved.value_or(SavedKind::pin));
    case Operation::list_saved:
    case Operation::read_saved_content:
      return saved_read_scope(resource.saved.value_or(SavedKind::pin));
    case Operation::register_command:
    case Operation::rename_command:
    case Operation::respond_to_command:
      return Scope::commands;
    case Operation::register_unfurl_domain:
      return teams ? Scope::message_handlers : Scope::links_write;
  }
  return std::nullopt;
}

bool PermissionEngine::can_read_origin(const TokenGrant& token, const AttachmentOrigin& origin,
                                       const World& world) const {
  if (const auto* m = std::get_if<MessageOrigin>(&origin)) {
    ResourceRef ref;
    ref.channel = m->channel;
    ref.message = m->message;
    return check(token, Operation::read_message, ref, world).allow;
  }
  if (const auto* f = std::get_if<FileOrigin>(&origin)) {
    const File* file = world.workspace.find_file(f->file);
    if (!file) return false;
    for (const auto& ch : file->shared_in) {
      ResourceRef ref;
      ref.channel = ch;
      if (check(token, Operation::read_history, ref, world).allow) return true;
    }
    return false;
  }
  return true;  // external content is public
}

bool PermissionEngine::rule_holds(RuntimeRule rule, const TokenGrant& token, Operation op,
                                  const ResourceRef& resource, const World& world) const {
  const Channel* channel =
      resource.channel ? world.workspace.find_channel(*resource.channel) : nullptr;
  const Message* message = channel && resource.message
                               ? world.workspace.find_message(channel->id, *resource.message)
                               : nullptr;
  switch (rule) {
    case RuntimeRule::none:
    case RuntimeRule::scheduled_firing:
    case RuntimeRule::collision_deferred:
    case RuntimeRule::user_scoped_listing:
      return true;
    case RuntimeRule::app_channel_membership:
      return channel && bot_in_channel(token, *channel);
    case RuntimeRule::user_channel_access:
      return channel && user_in_channel(token, *channel, world);
    case RuntimeRule::app_mention:
      if (!channel) return false;
      if (message) return mentions_app(token, *message, world);
      for (const Message* m : world.workspace.history(channel->id)) {
        if (mentions_app(token, *m, world)) return true;
      }
      return false;
    case RuntimeRule::destination_non_app:
      return channel && !is_app_target(*channel, token.app);
    case RuntimeRule::destination_app:
      return channel && is_app_target(*channel, token.app);
    case RuntimeRule::author_match: {
      if (!message) return false;
      if (!is_delegate(token)) return message->issuer == Principal{AppBotPrincipal{token.app}};
      return display_user(message->issuer) == token.user;
    }
    case RuntimeRule::origin_readable:
      return resource.origin && can_read_origin(token, *resource.origin, world);
    case RuntimeRule::issuer_is_other:
      return resource.entry_issuer && issuing_app(*resource.entry_issuer) != token.app;
    case RuntimeRule::name_available:
      if (op == Operation::register_unfurl_domain) {
        return !world.registry.domain_taken(resource.name, token.app);
      }
      return !world.registry.command_taken(resource.name, token.app);
    case RuntimeRule::command_invocation: {
      if (!resource.invocation) return false;
      const CommandInvocation* inv = world.workspace.find_invocation(*resource.invocation);
      return inv && inv->app == token.app;
    }
  }
  return false;
}

PermissionEngine::RuleOutcome PermissionEngine::runtime_rule(const TokenGrant& token,
                                                             Operation op,
                                                             const ResourceRef& resource,
                                                             const World& world) const {
  RuleOutcome out;
  const Channel* channel =
      resource.channel ? world.workspace.find_channel(*resource.channel) : nullptr;
  auto decide = [&](RuntimeRule rule, DenialReason on_fail) {
    out.rule = rule;
    out.pass = rule_holds(rule, token, op, resource, world);
    if (!out.pass) out.denial = on_fail;
  };
  auto membership = [&] {
    decide(is_delegate(token) ? RuntimeRule::user_channel_access
                              : RuntimeRule::app_channel_membership,
           DenialReason::not_in_channel);
  };
  // Delegated writes go anywhere the user can reach; user access is a
  // precondition, not a destination rule.
  auto delegate_precondition = [&]() -> bool {
    if (channel && user_in_channel(token, *channel, world)) return true;
    out.pass = false;
    out.denial = DenialReason::not_in_channel;
    out.note = "acting user cannot access the channel";
    return false;
  };

  switch (op) {
    case Operation::read_history:
    case Operation::read_message:
    case Operation::read_metadata: {
      const bool mention_rule = profile_.teams() && !is_delegate(token) && channel &&
                                (channel->kind == ChannelKind::public_channel ||
                                 channel->kind == ChannelKind::private_channel) &&
                                op != Operation::read_metadata;
      if (mention_rule) {
        decide(RuntimeRule::app_mention, DenialReason::not_in_channel);
      } else {
        membership();
      }
      return out;
    }
    case Operation::read_attachment: {
      if (resource.origin) {
        const auto* m = std::get_if<MessageOrigin>(&*resource.origin);
        const bool same_channel = m && resource.channel && m->channel == *resource.channel;
        if (!same_channel && !std::holds_alternative<ExternalOrigin>(*resource.origin)) {
          out.provenance = resource.origin;
        }
      }
      if (profile_.has(Countermeasure::unfurl_provenance)) {
        decide(RuntimeRule::origin_readable, DenialReason::provenance_blocked);
      } else {
        out.rule = RuntimeRule::none;
      }
      return out;
    }
    case Operation::post_message:
    case Operation::schedule_message:
    case Operation::fire_scheduled:
    case Operation::upload_file:
      if (!is_delegate(token)) {
        membership();
        return out;
      }
      if (!delegate_precondition()) return out;
      if (op != Operation::upload_file && profile_.has(Countermeasure::finer_scopes)) {
        const bool app_target = is_app_target(*channel, token.app);
        decide(app_target ? RuntimeRule::destination_app : RuntimeRule::destination_non_app,
               DenialReason::missing_scope);
      } else {
        out.rule = RuntimeRule::none;
      }
      return out;
    case Operation::customize_display:
      out.rule = RuntimeRule::none;
      return out;
    case Operation::delete_message:
      decide(RuntimeRule::author_match, DenialReason::not_author);
      return out;
    case Operation::add_saved:
    case Operation::remove_saved:
      out.rule = RuntimeRule::none;
      return out;
    case Operation::list_saved:
      decide(RuntimeRule::user_scoped_listing, DenialReason::not_in_channel);
      return out;
    case Operation::read_saved_content:
      if (resource.channel && resource.message) {
        out.provenance = MessageOrigin{*resource.channel, *resource.message};
      }
      if (profile_.has(Countermeasure::self_op_read)) {
        decide(RuntimeRule::issuer_is_other, DenialReason::self_op_blocked);
      } else {
        out.rule = RuntimeRule::none;
      }
      return out;
    case Operation::register_command:
    case Operation::rename_command:
    case Operation::register_unfurl_domain:
      if (!profile_.has(Countermeasure::collision_guard)) {
        out.rule = RuntimeRule::none;
      } else if (profile_.collision_mode == CollisionMode::reject) {
        decide(RuntimeRule::name_available, DenialReason::collision_rejected);
      } else {
        out.rule = RuntimeRule::collision_deferred;
      }
      return out;
    case Operation::respond_to_command:
      decide(RuntimeRule::command_invocation, DenialReason::not_in_channel);
      return out;
  }
  return out;
}

MediationTrace PermissionEngine::check(const TokenGrant& token, Operation op,
                                       const ResourceRef& resource, const World& world) const {
  MediationTrace t;
  t.app = token.app;
  t.grant = token.id;
  t.token_kind = token.kind;
  t.principal = token.principal();
  t.op = op;
  t.resource = resource;
  t.scope = required_scope(token, op, resource, world);

  auto deny = [&](DenialReason reason, std::string note) {
    t.allow = false;
    t.denial = reason;
    if (!note.empty()) t.note = std::move(note);
    return t;
  };

  if (channel_scoped(op) && (!resource.channel || !world.workspace.find_channel(*resource.channel))) {
    return deny(DenialReason::not_in_channel, "unknown channel");
  }

  if (token.revoked) {
    const bool residual_schedule = op == Operation::fire_scheduled && profile_.slack() &&
                                   !profile_.has(Countermeasure::full_revocation);
    if (!residual_schedule) return deny(DenialReason::revoked, "token revoked");
    t.level1_pass = t.scope && token.has(*t.scope);
    if (!t.level1_pass) return deny(DenialReason::missing_scope, {});
    t.rule = RuntimeRule::scheduled_firing;
    t.level2_pass = true;
    t.allow = true;
    t.escalation_prone = true;
    t.note = "fired from a revoked token";
    return t;
  }

  if (!t.scope || !scope_available(*t.scope, profile_)) {
    return deny(DenialReason::missing_scope, "no scope covers this operation");
  }
  t.level1_pass = token.has(*t.scope);
  if (!t.level1_pass) return deny(DenialReason::missing_scope, {});

  RuleOutcome rule = runtime_rule(token, op, resource, world);
  t.rule = rule.rule;
  t.level2_pass = rule.pass;
  t.note = rule.note;
  if (!rule.pass) return deny(rule.denial.value_or(DenialReason::not_in_channel), {});
  t.provenance_crossed = rule.provenance;
  t.allow = true;
  t.escalation_prone = t.rule == RuntimeRule::none;
  return t;
}

bool PermissionEngine::replay(const MediationTrace& trace, const TokenGrant& token,
                              const World& world) const {
  if (!trace.allow) return false;
  if (token.revoked && trace.rule != RuntimeRule::scheduled_firing) return false;
  if (!trace.scope || !token.has(*trace.scope)) return false;
  return rule_holds(trace.rule, token, trace.op, trace.resource, world);
}

}  // namespace bcpsim
