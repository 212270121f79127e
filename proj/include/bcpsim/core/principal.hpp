#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "bcpsim/core/ids.hpp"

namespace bcpsim {

struct UserPrincipal {
  UserId user;
  friend bool operator==(const UserPrincipal&, const UserPrincipal&) = default;
  friend auto operator<=>(const UserPrincipal&, const UserPrincipal&) = default;
};

struct AppBotPrincipal {
  AppId app;
  friend bool operator==(const AppBotPrincipal&, const AppBotPrincipal&) = default;
  friend auto operator<=>(const AppBotPrincipal&, const AppBotPrincipal&) = default;
};

// An app acting with a user's delegated credential. Displays as the user;
// the variant itself keeps the true issuer.
struct DelegatedPrincipal {
  AppId app;
  UserId acting_user;
  friend bool operator==(const DelegatedPrincipal&, const DelegatedPrincipal&) = default;
  friend auto operator<=>(const DelegatedPrincipal&, const DelegatedPrincipal&) = default;
};

using Principal = std::variant<UserPrincipal, AppBotPrincipal, DelegatedPrincipal>;

// The human shown as author, if any (User and DelegatedApp).
std::optional<UserId> display_user(const Principal& p);
// The app behind the action, if any (AppBot and DelegatedApp).
std::optional<AppId> issuing_app(const Principal& p);
bool is_delegated(const Principal& p);

// "user:U1", "bot:A1", "delegate:A1/U1"
std::string to_string(const Principal& p);
std::optional<Principal> parse_principal(std::string_view text);

}  // namespace bcpsim
