#include "bcpsim/permission/registry.hpp"

#include <algorithm>

#include "bcpsim/core/url.hpp"

namespace bcpsim {

Principal TokenGrant::principal() const {
  if (kind == TokenKind::bot || !user) return AppBotPrincipal{app};
  return DelegatedPrincipal{app, *user};
}

InstalledApp& AppRegistry::add_app(AppId id, Manifest manifest, UserId installed_by) {
  InstalledApp app;
  app.id = id;
  app.manifest = std::move(manifest);
  app.installed_by = std::move(installed_by);
  app.install_seq = next_seq();
  return apps_.insert_or_assign(id, std::move(app)).first->second;
}

const InstalledApp* AppRegistry::find_app(const AppId& id) const {
  auto it = apps_.find(id);
  return it == apps_.end() ? nullptr : &it->second;
}

InstalledApp* AppRegistry::find_app(const AppId& id) {
  auto it = apps_.find(id);
  return it == apps_.end() ? nullptr : &it->second;
}

const InstalledApp* AppRegistry::app_by_name(std::string_view name, bool installed_only) const {
  for (const auto& [id, app] : apps_) {
    if (app.manifest.name == name && (app.installed || !installed_only)) return &app;
  }
  return nullptr;
}

bool AppRegistry::active(const AppId& id) const {
  const InstalledApp* app = find_app(id);
  return app && app->installed;
}

void AppRegistry::erase_app(const AppId& id) {
  apps_.erase(id);
  std::erase_if(grants_, [&](const auto& kv) { return kv.second.app == id; });
  std::erase_if(commands_, [&](const auto& reg) { return reg.owner == id; });
  std::erase_if(domains_, [&](const auto& reg) { return reg.owner == id; });
}

TokenGrant& AppRegistry::add_grant(AppId app, TokenKind kind, std::optional<UserId> user,
                                   ScopeSet scopes) {
  TokenGrant grant;
  grant.id = GrantId{++grant_seq_};
  grant.app = std::move(app);
  grant.kind = kind;
  grant.user = std::move(user);
  grant.scopes = std::move(scopes);
  return grants_.emplace(grant.id, std::move(grant)).first->second;
}

const TokenGrant* AppRegistry::find_grant(GrantId id) const {
  auto it = grants_.find(id);
  return it == grants_.end() ? nullptr : &it->second;
}

TokenGrant* AppRegistry::find_grant(GrantId id) {
  auto it = grants_.find(id);
  return it == grants_.end() ? nullptr : &it->second;
}

std::vector<const TokenGrant*> AppRegistry::grants_of(const AppId& app) const {
  std::vector<const TokenGrant*> out;
  for (const auto& [id, g] : grants_) {
    if (g.app == app) out.push_back(&g);
  }
  return out;
}

std::vector<TokenGrant*> AppRegistry::grants_of(const AppId& app) {
  std::vector<TokenGrant*> out;
  for (auto& [id, g] : grants_) {
    if (g.app == app) out.push_back(&g);
  }
  return out;
}

std::vector<const CommandRegistration*> AppRegistry::command_owners(std::string_view name) const {
  std::vector<const CommandRegistration*> out;
  for (const auto& reg : commands_) {
    if (reg.name == name && active(reg.owner)) out.push_back(&reg);
  }
  std::sort(out.begin(), out.end(),
            [](const auto* a, const auto* b) { return a->install_seq > b->install_seq; });
  return out;
}

bool AppRegistry::command_taken(std::string_view name, const AppId& except) const {
  for (const auto* reg : command_owners(name)) {
    if (reg->owner != except) return true;
  }
  return false;
}

std::vector<const DomainRegistration*> AppRegistry::domain_owners(std::string_view host) const {
  std::vector<const DomainRegistration*> out;
  for (const auto& reg : domains_) {
    if (host_matches_domain(host, reg.domain) && active(reg.owner)) out.push_back(&reg);
  }
  std::sort(out.begin(), out.end(),
            [](const auto* a, const auto* b) { return a->install_seq > b->install_seq; });
  return out;
}

bool AppRegistry::domain_taken(std::string_view domain, const AppId& except) const {
  for (const auto& reg : domains_) {
    if (reg.domain == domain && reg.owner != except && active(reg.owner)) return true;
  }
  return false;
}

}  // namespace bcpsim
