#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bcpsim/core/ids.hpp"
#include "bcpsim/core/manifest.hpp"
#include "bcpsim/core/principal.hpp"
#include "bcpsim/core/scope.hpp"

namespace bcpsim {

struct TokenGrant {
  GrantId id;
  AppId app;
  TokenKind kind = TokenKind::bot;
  std::optional<UserId> user;  // set for delegate grants
  ScopeSet scopes;
  bool revoked = false;

  bool has(Scope scope) const { return scopes.contains(scope); }
  Principal principal() const;
};

struct InstalledApp {
  AppId id;
  Manifest manifest;
  UserId installed_by;
  bool installed = true;
  std::uint64_t install_seq = 0;
  GrantId bot_grant;
};

struct CommandRegistration {
  std::string name;       // as routed (may be an alias)
  std::string requested;  // as asked for by the app
  AppId owner;
  std::uint64_t install_seq = 0;
};

struct DomainRegistration {
  std::string domain;
  AppId owner;
  std::uint64_t install_seq = 0;
};

// Installed apps, credentials, and the shared command/domain namespaces.
class AppRegistry {
 public:
  InstalledApp& add_app(AppId id, Manifest manifest, UserId installed_by);
  const InstalledApp* find_app(const AppId& id) const;
  InstalledApp* find_app(const AppId& id);
  const InstalledApp* app_by_name(std::string_view name, bool installed_only = true) const;
  const std::map<AppId, InstalledApp>& apps() const noexcept { return apps_; }
  bool active(const AppId& id) const;
  // Drops every trace of an app (used to roll back a failed install).
  void erase_app(const AppId& id);

  TokenGrant& add_grant(AppId app, TokenKind kind, std::optional<UserId> user, ScopeSet scopes);
  const TokenGrant* find_grant(GrantId id) const;
  TokenGrant* find_grant(GrantId id);
  std::vector<const TokenGrant*> grants_of(const AppId& app) const;
  std::vector<TokenGrant*> grants_of(const AppId& app);

  std::uint64_t next_seq() { return ++seq_; }

  void add_command(CommandRegistration reg) { commands_.push_back(std::move(reg)); }
  std::vector<CommandRegistration>& commands() noexcept { return commands_; }
  const std::vector<CommandRegistration>& commands() const noexcept { return commands_; }
  // Active registrations of `name`, newest first.
  std::vector<const CommandRegistration*> command_owners(std::string_view name) const;
  bool command_taken(std::string_view name, const AppId& except) const;

  void add_domain(DomainRegistration reg) { domains_.push_back(std::move(reg)); }
  const std::vector<DomainRegistration>& domains() const noexcept { return domains_; }
  // Active registrations whose domain covers `host`, newest first.
  std::vector<const DomainRegistration*> domain_owners(std::string_view host) const;
  bool domain_taken(std::string_view domain, const AppId& except) const;

 private:
  std::map<AppId, InstalledApp> apps_;
  std::map<GrantId, TokenGrant> grants_;
  std::vector<CommandRegistration> commands_;
  std::vector<DomainRegistration> domains_;
  std::uint64_t seq_ = 0;
  std::uint64_t grant_seq_ = 0;
};

}  // namespace bcpsim
