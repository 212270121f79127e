#include "bcpsim/error.hpp"

#include <array>

namespace bcpsim {

namespace {

constexpr std::array<std::string_view, 8> kDenialNames = {
    "missing_scope",         "not_in_channel",     "revoked",         "collision_rejected",
    "confirmation_required", "provenance_blocked", "self_op_blocked", "not_author",
};

}  // namespace

std::string_view to_string(DenialReason reason) {
  return kDenialNames.at(static_cast<std::size_t>(reason));
}

std::optional<DenialReason> parse_denial_reason(std::string_view text) {
  for (std::size_t i = 0; i < kDenialNames.size(); ++i) {
    if (kDenialNames[i] == text) return static_cast<DenialReason>(i);
  }
  return std::nullopt;
}

std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::denied: return "denied";
    case Errc::unknown_target: return "unknown_target";
    case Errc::unknown_message: return "unknown_message";
    case Errc::unknown_app: return "unknown_app";
    case Errc::unknown_command: return "unknown_command";
    case Errc::unknown_trace: return "unknown_trace";
    case Errc::collision_rejected: return "collision_rejected";
    case Errc::malformed_manifest: return "malformed_manifest";
    case Errc::malformed_url: return "malformed_url";
    case Errc::user_declined: return "user_declined";
    case Errc::invalid_anchors: return "invalid_anchors";
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::unsupported: return "unsupported";
  }
  return "unknown";
}

std::string Error::message() const {
  std::string out(to_string(code));
  if (denial) {
    out += "(";
    out += to_string(*denial);
    out += ")";
  }
  if (!detail.empty()) {
    out += ": ";
    out += detail;
  }
  return out;
}

Error make_error(Errc code, std::string detail) {
  Error e;
  e.code = code;
  e.detail = std::move(detail);
  return e;
}

Error make_denial(DenialReason reason, std::string detail, std::optional<std::uint64_t> trace_id) {
  Error e;
  e.code = reason == DenialReason::collision_rejected ? Errc::collision_rejected : Errc::denied;
  e.denial = reason;
  e.detail = std::move(detail);
  e.trace_id = trace_id;
  return e;
}

}  // namespace bcpsim
