#include "bcpsim/permission/profile.hpp"

#include <array>

namespace bcpsim {

namespace {

constexpr std::array<Countermeasure, 6> kAllCountermeasures = {
    Countermeasure::finer_scopes,    Countermeasure::unfurl_provenance,
    Countermeasure::self_op_read,    Countermeasure::issuer_identity,
    Countermeasure::collision_guard, Countermeasure::full_revocation,
};

}  // namespace

std::string_view code(Countermeasure cm) {
  switch (cm) {
    case Countermeasure::finer_scopes: return "C1";
    case Countermeasure::unfurl_provenance: return "C2";
    case Countermeasure::self_op_read: return "C3";
    case Countermeasure::issuer_identity: return "C4";
    case Countermeasure::collision_guard: return "C5";
    case Countermeasure::full_revocation: return "C6";
  }
  return "?";
}

std::string_view to_string(CollisionMode mode) {
  switch (mode) {
    case CollisionMode::reject: return "Reject";
    case CollisionMode::prompt: return "Prompt";
    case CollisionMode::alias: return "Alias";
  }
  return "?";
}

std::string PolicyProfile::describe() const {
  std::string out(to_string(platform));
  char sep = '+';
  for (Countermeasure cm : countermeasures) {
    out += sep;
    out += code(cm);
    if (cm == Countermeasure::collision_guard) {
      out += "-";
      out += to_string(collision_mode);
    }
    sep = ',';
  }
  return out;
}

PolicyProfile PolicyProfile::baseline(PlatformKind platform) {
  PolicyProfile p;
  p.platform = platform;
  return p;
}

PolicyProfile PolicyProfile::all_countermeasures(PlatformKind platform, CollisionMode mode) {
  PolicyProfile p;
  p.platform = platform;
  p.countermeasures.insert(kAllCountermeasures.begin(), kAllCountermeasures.end());
  p.collision_mode = mode;
  return p;
}

Status apply_countermeasure_flag(PolicyProfile& profile, std::string_view flag) {
  if (flag == "all") {
    profile.countermeasures.insert(kAllCountermeasures.begin(), kAllCountermeasures.end());
    return ok_status();
  }
  for (Countermeasure cm : kAllCountermeasures) {
    if (flag == code(cm)) {
      profile.countermeasures.insert(cm);
      return ok_status();
    }
  }
  for (CollisionMode mode : {CollisionMode::reject, CollisionMode::prompt, CollisionMode::alias}) {
    if (flag == "C5-" + std::string(to_string(mode))) {
      profile.countermeasures.insert(Countermeasure::collision_guard);
      profile.collision_mode = mode;
      return ok_status();
    }
  }
  return make_error(Errc::invalid_argument, "unknown countermeasure \"" + std::string(flag) + "\"");
}

bool scope_available(Scope scope, const PolicyProfile& profile) {
  switch (scope) {
    case Scope::chat_write_human:
    case Scope::chat_write_app:
      return profile.has(Countermeasure::finer_scopes);
    case Scope::chat_read_write:
    case Scope::bot_commands:
    case Scope::message_handlers:
      return profile.teams();
    default:
      return true;
  }
}

}  // namespace bcpsim
