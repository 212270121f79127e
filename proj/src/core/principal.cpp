#include "bcpsim/core/principal.hpp"

namespace bcpsim {

std::optional<UserId> display_user(const Principal& p) {
  if (const auto* u = std::get_if<UserPrincipal>(&p)) return u->user;
  if (const auto* d = std::get_if<DelegatedPrincipal>(&p)) return d->acting_user;
  return std::nullopt;
}

std::optional<AppId> issuing_app(const Principal& p) {
  if (const auto* b = std::get_if<AppBotPrincipal>(&p)) return b->app;
  if (const auto* d = std::get_if<DelegatedPrincipal>(&p)) return d->app;
  return std::nullopt;
}

bool is_delegated(const Principal& p) { return std::holds_alternative<DelegatedPrincipal>(p); }

std::string to_string(const Principal& p) {
  if (const auto* u = std::get_if<UserPrincipal>(&p)) return "user:" + u->user.str();
  if (const auto* b = std::get_if<AppBotPrincipal>(&p)) return "bot:" + b->app.str();
  const auto& d = std::get<DelegatedPrincipal>(p);
  return "delegate:" + d.app.str() + "/" + d.acting_user.str();
}

std::optional<Principal> parse_principal(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) return std::nullopt;
  std::string_view kind = text.substr(0, colon);
  std::string rest(text.substr(colon + 1));
  if (rest.empty()) return std::nullopt;
  if (kind == "user") return UserPrincipal{UserId(rest)};
  if (kind == "bot") return AppBotPrincipal{AppId(rest)};
  if (kind == "delegate") {
    const auto slash = rest.find('/');
    if (slash == std::string::npos) return std::nullopt;
    return DelegatedPrincipal{AppId(rest.substr(0, slash)), UserId(rest.substr(slash + 1))};
  }
  return std::nullopt;
}

}  // namespace bcpsim
