#include "bcpsim/permission/trace.hpp"

#include <array>
#include <sstream>

namespace bcpsim {

namespace {

constexpr std::array<std::string_view, 18> kOperationNames = {
    "read_history",     "read_message",       "read_metadata",   "read_attachment",
    "post_message",     "customize_display",  "delete_message",  "schedule_message",
    "fire_scheduled",   "upload_file",        "add_saved",       "remove_saved",
    "list_saved",       "read_saved_content", "register_command", "rename_command",
    "register_unfurl_domain", "respond_to_command",
};

constexpr std::array<std::string_view, 14> kRuleNames = {
    "no-rule",          "app-channel-membership", "user-channel-access", "app-mention",
    "destination-non-app", "destination-app",     "author-match",        "scheduled-firing",
    "origin-readable",  "issuer-is-other",        "name-available",      "collision-deferred",
    "user-scoped-listing", "command-invocation",
};

std::optional<SavedKind> parse_saved_kind(std::string_view text) {
  if (text == "pin") return SavedKind::pin;
  if (text == "star") return SavedKind::star;
  if (text == "reaction") return SavedKind::reaction;
  return std::nullopt;
}

std::optional<PostAction> parse_post_action(std::string_view text) {
  for (PostAction a : {PostAction::user_text, PostAction::app_text, PostAction::file_only,
                       PostAction::draft_save}) {
    if (text == to_string(a)) return a;
  }
  return std::nullopt;
}

std::optional<TokenKind> parse_token_kind(std::string_view text) {
  for (TokenKind k : {TokenKind::bot, TokenKind::user_delegate, TokenKind::graph_delegate}) {
    if (text == to_string(k)) return k;
  }
  return std::nullopt;
}

std::string str_or(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  return it != j.end() && it->is_string() ? it->get<std::string>() : std::string{};
}

}  // namespace

std::string_view to_string(Operation op) { return kOperationNames.at(static_cast<std::size_t>(op)); }

std::optional<Operation> parse_operation(std::string_view text) {
  for (std::size_t i = 0; i < kOperationNames.size(); ++i) {
    if (kOperationNames[i] == text) return static_cast<Operation>(i);
  }
  return std::nullopt;
}

std::string_view to_string(RuntimeRule rule) { return kRuleNames.at(static_cast<std::size_t>(rule)); }

std::optional<RuntimeRule> parse_runtime_rule(std::string_view text) {
  for (std::size_t i = 0; i < kRuleNames.size(); ++i) {
    if (kRuleNames[i] == text) return static_cast<RuntimeRule>(i);
  }
  return std::nullopt;
}

std::string to_string(const ResourceRef& ref) {
  std::string out;
  auto add = [&](std::string_view key, const std::string& value) {
    if (!out.empty()) out += ' ';
    out += key;
    out += '=';
    out += value;
  };
  if (ref.channel) add("channel", ref.channel->str());
  if (ref.message) add("message", ref.message->str());
  if (ref.saved) add("saved", std::string(to_string(*ref.saved)));
  if (ref.origin) add("origin", to_string(*ref.origin));
  if (ref.entry_issuer) add("entry_issuer", to_string(*ref.entry_issuer));
  if (ref.invocation) add("invocation", std::to_string(ref.invocation->value));
  if (!ref.name.empty()) add("name", ref.name);
  if (ref.creation) add("creation", std::string(to_string(*ref.creation)));
  return out.empty() ? "-" : out;
}

bool MediationTrace::is_read() const {
  switch (op) {
    case Operation::read_history:
    case Operation::read_message:
    case Operation::read_metadata:
    case Operation::read_attachment:
    case Operation::list_saved:
    case Operation::read_saved_content:
      return true;
    default:
      return false;
  }
}

nlohmann::json to_json(const MediationTrace& t) {
  using nlohmann::json;
  json resource = json::object();
  const auto& r = t.resource;
  if (r.channel) resource["channel"] = r.channel->str();
  if (r.message) resource["message"] = r.message->str();
  if (r.saved) resource["saved"] = std::string(to_string(*r.saved));
  if (r.origin) resource["origin"] = to_string(*r.origin);
  if (r.entry_issuer) resource["entry_issuer"] = to_string(*r.entry_issuer);
  if (r.invocation) resource["invocation"] = r.invocation->value;
  if (!r.name.empty()) resource["name"] = r.name;
  if (r.creation) resource["creation"] = std::string(to_string(*r.creation));

  json j{
      {"trace_id", t.label},
      {"seq", t.seq},
      {"at", t.at},
      {"app", t.app.str()},
      {"grant", t.grant.value},
      {"token_kind", std::string(to_string(t.token_kind))},
      {"principal", to_string(t.principal)},
      {"op", std::string(to_string(t.op))},
      {"resource", resource},
      {"level1", {{"scope", t.scope ? json(std::string(scope_name(*t.scope))) : json(nullptr)},
                  {"pass", t.level1_pass}}},
      {"level2", {{"rule", std::string(to_string(t.rule))}, {"pass", t.level2_pass}}},
      {"provenance_crossed",
       t.provenance_crossed ? json(to_string(*t.provenance_crossed)) : json(nullptr)},
      {"decision", t.allow ? "allow" : "deny"},
      {"denial", t.denial ? json(std::string(to_string(*t.denial))) : json(nullptr)},
      {"escalation_prone", t.escalation_prone},
  };
  if (!t.note.empty()) j["note"] = t.note;
  return j;
}

Result<MediationTrace> trace_from_json(const nlohmann::json& j) {
  const auto bad = [](std::string what) {
    return make_error(Errc::invalid_argument, "malformed trace record: " + what);
  };
  if (!j.is_object()) return bad("not an object");
  MediationTrace t;
  t.label = str_or(j, "trace_id");
  t.seq = j.value("seq", std::uint64_t{0});
  t.at = j.value("at", SimTime{0});
  t.app = AppId(str_or(j, "app"));
  t.grant = GrantId{j.value("grant", std::uint64_t{0})};
  if (auto k = parse_token_kind(str_or(j, "token_kind"))) t.token_kind = *k;
  auto principal = parse_principal(str_or(j, "principal"));
  if (!principal) return bad("principal");
  t.principal = *principal;
  auto op = parse_operation(str_or(j, "op"));
  if (!op) return bad("op");
  t.op = *op;

  const auto& r = j.value("resource", nlohmann::json::object());
  if (auto s = str_or(r, "channel"); !s.empty()) t.resource.channel = ChannelId(s);
  if (auto s = str_or(r, "message"); !s.empty()) t.resource.message = MessageId::parse(s);
  if (auto s = str_or(r, "saved"); !s.empty()) t.resource.saved = parse_saved_kind(s);
  if (auto s = str_or(r, "origin"); !s.empty()) t.resource.origin = parse_origin(s);
  if (auto s = str_or(r, "entry_issuer"); !s.empty()) t.resource.entry_issuer = parse_principal(s);
  if (r.contains("invocation")) {
    t.resource.invocation = InvocationId{r.value("invocation", std::uint64_t{0})};
  }
  t.resource.name = str_or(r, "name");
  if (auto s = str_or(r, "creation"); !s.empty()) t.resource.creation = parse_post_action(s);

  const auto& l1 = j.value("level1", nlohmann::json::object());
  if (auto s = str_or(l1, "scope"); !s.empty()) t.scope = parse_scope(s);
  t.level1_pass = l1.value("pass", false);
  const auto& l2 = j.value("level2", nlohmann::json::object());
  if (auto rule = parse_runtime_rule(str_or(l2, "rule"))) t.rule = *rule;
  t.level2_pass = l2.value("pass", false);
  if (auto s = str_or(j, "provenance_crossed"); !s.empty()) t.provenance_crossed = parse_origin(s);
  t.allow = str_or(j, "decision") == "allow";
  if (auto s = str_or(j, "denial"); !s.empty()) t.denial = parse_denial_reason(s);
  t.escalation_prone = j.value("escalation_prone", false);
  t.note = str_or(j, "note");
  return t;
}

std::string explain(const MediationTrace& t) {
  std::ostringstream out;
  out << "trace " << (t.label.empty() ? std::to_string(t.seq) : t.label) << " at t=" << t.at
      << "\n";
  out << "  request:    " << to_string(t.principal) << " (" << to_string(t.token_kind)
      << " grant " << t.grant.value << ") " << to_string(t.op) << " " << to_string(t.resource)
      << "\n";
  out << "  level 1:    ";
  if (t.scope) {
    out << "scope " << scope_name(*t.scope) << (t.level1_pass ? " held" : " missing");
  } else {
    out << (t.level1_pass ? "no scope required" : "not evaluated");
  }
  out << "\n";
  out << "  level 2:    ";
  if (!t.level1_pass) {
    out << "not evaluated";
  } else {
    out << "rule " << to_string(t.rule) << (t.level2_pass ? " passed" : " failed");
    if (t.rule == RuntimeRule::none) out << " (the platform imposes no runtime check here)";
  }
  out << "\n";
  out << "  provenance: ";
  if (t.provenance_crossed) {
    out << "content crossed from " << to_string(*t.provenance_crossed)
        << " (not the resource checked)";
  } else {
    out << "no crossing";
  }
  out << "\n";
  out << "  decision:   " << (t.allow ? "allow" : "deny");
  if (t.denial) out << " (" << to_string(*t.denial) << ")";
  if (t.escalation_prone) out << ", escalation-prone";
  out << "\n";
  if (!t.note.empty()) out << "  note:       " << t.note << "\n";
  return out.str();
}

Error denial_error(const MediationTrace& t) {
  std::string detail = std::string(to_string(t.op)) + " by " + to_string(t.principal);
  if (t.denial == DenialReason::missing_scope && t.scope) {
    detail += ": needs " + std::string(scope_name(*t.scope));
  } else if (!t.note.empty()) {
    detail += ": " + t.note;
  }
  return make_denial(t.denial.value_or(DenialReason::missing_scope), std::move(detail), t.seq);
}

}  // namespace bcpsim
