#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>

namespace bcpsim {

// Closed set of reasons a mediation decision can deny an access.
enum class DenialReason {
  missing_scope,
  not_in_channel,
  revoked,
  collision_rejected,
  confirmation_required,
  provenance_blocked,
  self_op_blocked,
  not_author,
};

std::string_view to_string(DenialReason reason);
std::optional<DenialReason> parse_denial_reason(std::string_view text);

enum class Errc {
  denied,
  unknown_target,
  unknown_message,
  unknown_app,
  unknown_command,
  unknown_trace,
  collision_rejected,
  malformed_manifest,
  malformed_url,
  user_declined,
  invalid_anchors,
  invalid_argument,
  unsupported,
};

std::string_view to_string(Errc code);

struct Error {
  Errc code = Errc::invalid_argument;
  std::string detail;
  // Set when code == Errc::denied (and for collision rejections).
  std::optional<DenialReason> denial;
  // Mediation trace that produced the denial, if any.
  std::optional<std::uint64_t> trace_id;

  std::string message() const;
};

Error make_error(Errc code, std::string detail = {});
Error make_denial(DenialReason reason, std::string detail, std::optional<std::uint64_t> trace_id);

// Value-or-error return type used across the platform API. Denials are
// ordinary values here, not exceptions.
template <class T>
class [[nodiscard]] Result {
 public:
  Result(T value) : v_(std::in_place_index<0>, std::move(value)) {}
  Result(Error error) : v_(std::in_place_index<1>, std::move(error)) {}

  bool ok() const noexcept { return v_.index() == 0; }
  explicit operator bool() const noexcept { return ok(); }

  const T& value() const& {
    ensure();
    return std::get<0>(v_);
  }
  T& value() & {
    ensure();
    return std::get<0>(v_);
  }
  T&& value() && {
    ensure();
    return std::get<0>(std::move(v_));
  }
  const T& operator*() const& { return value(); }
  const T* operator->() const { return &value(); }

  const Error& error() const {
    if (ok()) throw std::logic_error("Result holds a value, not an error");
    return std::get<1>(v_);
  }

  bool is(Errc code) const noexcept { return !ok() && std::get<1>(v_).code == code; }
  bool denied_for(DenialReason reason) const noexcept {
    return !ok() && std::get<1>(v_).denial == reason;
  }

 private:
  void ensure() const {
    if (!ok()) throw std::logic_error("Result holds error: " + std::get<1>(v_).message());
  }

  std::variant<T, Error> v_;
};

struct Ok {};
using Status = Result<Ok>;

inline Status ok_status() { return Ok{}; }

}  // namespace bcpsim
