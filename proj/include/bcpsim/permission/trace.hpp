#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "bcpsim/core/ids.hpp"
#include "bcpsim/core/message_id.hpp"
#include "bcpsim/core/principal.hpp"
#include "bcpsim/core/scope.hpp"
#include "bcpsim/core/workspace.hpp"
#include "bcpsim/error.hpp"

namespace bcpsim {

enum class Operation {
  read_history,
  read_message,
  read_metadata,
  read_attachment,
  post_message,
  customize_display,
  delete_message,
  schedule_message,
  fire_scheduled,
  upload_file,
  add_saved,
  remove_saved,
  list_saved,
  read_saved_content,
  register_command,
  rename_command,
  register_unfurl_domain,
  respond_to_command,
};

std::string_view to_string(Operation op);
std::optional<Operation> parse_operation(std::string_view text);

// Level-2 rule consulted for a decision. `none` means the platform imposes
// no runtime check for this access.
enum class RuntimeRule {
  none,
  app_channel_membership,
  user_channel_access,
  app_mention,
  destination_non_app,
  destination_app,
  author_match,
  scheduled_firing,
  origin_readable,
  issuer_is_other,
  name_available,
  collision_deferred,
  user_scoped_listing,
  command_invocation,
};

std::string_view to_string(RuntimeRule rule);
std::optional<RuntimeRule> parse_runtime_rule(std::string_view text);

// What an access touches. Only the fields relevant to the operation are set.
struct ResourceRef {
  std::optional<ChannelId> channel;
  std::optional<MessageId> message;
  std::optional<SavedKind> saved;
  std::optional<AttachmentOrigin> origin;      // read_attachment
  std::optional<Principal> entry_issuer;       // read_saved_content
  std::optional<InvocationId> invocation;      // respond_to_command
  std::string name;                            // command or domain
  std::optional<PostAction> creation;          // delete_message: how it was made
};

std::string to_string(const ResourceRef& ref);

struct MediationTrace {
  std::uint64_t seq = 0;  // assigned when logged
  std::string label;      // "<scenario>#<seq>"
  SimTime at = 0;

  AppId app;
  GrantId grant;
  TokenKind token_kind = TokenKind::bot;
  Principal principal;
  Operation op = Operation::read_history;
  ResourceRef resource;

  std::optional<Scope> scope;  // satisfying scope on pass, needed scope on fail
  bool level1_pass = false;
  RuntimeRule rule = RuntimeRule::none;
  bool level2_pass = false;
  std::optional<AttachmentOrigin> provenance_crossed;

  bool allow = false;
  std::optional<DenialReason> denial;
  bool escalation_prone = false;
  std::string note;

  // Allow that hands out content whose origin is not the resource checked.
  bool crosses_provenance() const { return provenance_crossed.has_value(); }
  bool is_read() const;
};

nlohmann::json to_json(const MediationTrace& t);
Result<MediationTrace> trace_from_json(const nlohmann::json& j);

// Multi-line human-readable account of one decision.
std::string explain(const MediationTrace& t);

// Turns a denying trace into the API error.
Error denial_error(const MediationTrace& t);

}  // namespace bcpsim
