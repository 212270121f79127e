#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "bcpsim/core/bootstrap.hpp"
#include "bcpsim/platform/behavior.hpp"
#include "bcpsim/platform/platform.hpp"
#include "bcpsim/victims/ledger.hpp"

namespace bcpsim {

// Shared plumbing for the benign apps: ledger access and the optional
// issuer check (drop triggers issued by a delegated app).
class VictimApp : public AppBehavior {
 public:
  VictimApp(EffectLedger& ledger, bool issuer_check) : ledger_(ledger), issuer_check_(issuer_check) {}

  bool issuer_check() const noexcept { return issuer_check_; }

 protected:
  bool ignored(const Event& event) const;
  void record(EffectPayload payload, const Event& cause, const Platform& platform,
              const AppId& self);
  // Linked external account of the event's display user, if any.
  static std::optional<std::string> linked_account(const Event& event, const Platform& platform,
                                                   const std::string& key);
  static void reply(Platform& platform, const AppId& self, const ChannelId& channel,
                    const std::string& text);

 private:
  EffectLedger& ledger_;
  bool issuer_check_;
};

// Forwards every human-authored message in one channel as an email.
class MailBridge : public VictimApp {
 public:
  MailBridge(EffectLedger& ledger, bool issuer_check, std::string channel,
             std::vector<std::string> recipients);
  void on_event(const Event& event, Platform& platform, const AppId& self) override;

 private:
  std::string channel_;
  std::vector<std::string> recipients_;
};

// Relays a channel to a website visitor and back.
class LiveChat : public VictimApp {
 public:
  LiveChat(EffectLedger& ledger, bool issuer_check, std::string channel, std::string visitor);
  void on_event(const Event& event, Platform& platform, const AppId& self) override;
  // Scripted visitor side: posts the visitor's text into the channel.
  void visitor_says(Platform& platform, const AppId& self, const std::string& text);

 private:
  std::string channel_;
  std::string visitor_;
};

// "merge <pr>" asks for confirmation, "yes" merges, "list" lists open PRs.
class RepoBot : public VictimApp {
 public:
  RepoBot(EffectLedger& ledger, bool issuer_check, std::string repo, std::string account_key,
          std::vector<int> open_prs);
  void on_event(const Event& event, Platform& platform, const AppId& self) override;

 private:
  std::string repo_;
  std::string account_key_;
  std::set<int> open_prs_;
  std::map<ChannelId, int> pending_;
};

// "Run flow <id>", "List flows", "Describe flow <id>".
class FlowRunner : public VictimApp {
 public:
  FlowRunner(EffectLedger& ledger, bool issuer_check, std::string account_key,
             std::vector<std::string> flows);
  void on_event(const Event& event, Platform& platform, const AppId& self) override;

 private:
  std::string account_key_;
  std::vector<std::string> flows_;
};

// Retweets a tweet link when the configured emoji is added to its message.
class TweetReactor : public VictimApp {
 public:
  TweetReactor(EffectLedger& ledger, bool issuer_check, std::string emoji,
               std::string account_key);
  void on_event(const Event& event, Platform& platform, const AppId& self) override;

 private:
  std::string emoji_;
  std::string account_key_;
};

// Collects every shared file into the uploader's linked portal account.
class FileIndexer : public VictimApp {
 public:
  FileIndexer(EffectLedger& ledger, bool issuer_check, std::string account_key);
  void on_event(const Event& event, Platform& platform, const AppId& self) override;

 private:
  std::string account_key_;
};

// Starts a meeting on this app's host account when its command is run.
class VideoCall : public VictimApp {
 public:
  VideoCall(EffectLedger& ledger, bool issuer_check, std::string host_account);
  void on_event(const Event& event, Platform& platform, const AppId& self) override;

 private:
  std::string host_account_;
  int meetings_ = 0;
};

// Link-preview provider for its registered domains. No ledger effects.
class CardRenderer : public AppBehavior {
 public:
  explicit CardRenderer(std::string title) : title_(std::move(title)) {}
  void on_event(const Event&, Platform&, const AppId&) override {}
  std::optional<UnfurlCard> render_unfurl(const std::string& url, const Platform& platform,
                                          const AppId& self) override;

 private:
  std::string title_;
};

// Builds the behavior named by a bootstrap entry; nullptr for unknown kinds.
std::unique_ptr<AppBehavior> make_behavior(const std::string& kind, const std::string& config_json,
                                           EffectLedger& ledger, bool issuer_check);

// Factory for Platform::from_bootstrap writing into `ledger`.
BehaviorFactory victim_factory(EffectLedger& ledger, bool issuer_check);

}  // namespace bcpsim
