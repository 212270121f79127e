#include "bcpsim/victims/apps.hpp"

#include <algorithm>
#include <cctype>

#include <json.hpp>

#include "bcpsim/core/url.hpp"

namespace bcpsim {

namespace {

std::string normalize(std::string_view text) {
  std::string out;
  for (char c : text) out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  const auto first = out.find_first_not_of(" \t\n");
  if (first == std::string::npos) return {};
  const auto last = out.find_last_not_of(" \t\n");
  return out.substr(first, last - first + 1);
}

std::optional<std::string> word_after(const std::string& text, std::string_view prefix) {
  if (!text.starts_with(prefix)) return std::nullopt;
  std::string rest = normalize(text.substr(prefix.size()));
  if (rest.empty() || rest.find(' ') != std::string::npos) return std::nullopt;
  return rest;
}

bool on_channel(const Event& event, const Platform& platform, const std::string& name) {
  const Channel* ch = platform.workspace().find_channel(event.channel);
  return ch && ch->name == name;
}

}  // namespace

bool VictimApp::ignored(const Event& event) const {
  return issuer_check_ && event.issuer && is_delegated(*event.issuer);
}

void VictimApp::record(EffectPayload payload, const Event& cause, const Platform& platform,
                       const AppId& self) {
  ledger_.append(Effect{std::move(payload), cause.id, platform.now(), self});
}

std::optional<std::string> VictimApp::linked_account(const Event& event, const Platform& platform,
                                                     const std::string& key) {
  if (!event.display_user) return std::nullopt;
  const User* u = platform.workspace().find_user(*event.display_user);
  if (!u) return std::nullopt;
  auto it = u->linked_accounts.find(key);
  if (it == u->linked_accounts.end()) return std::nullopt;
  return it->second;
}

void VictimApp::reply(Platform& platform, const AppId& self, const ChannelId& channel,
                      const std::string& text) {
  if (auto grant = platform.bot_grant(self)) {
    (void)platform.post_message(*grant, channel, text);
  }
}

// ---------------------------------------------------------------- mail bridge

MailBridge::MailBridge(EffectLedger& ledger, bool issuer_check, std::string channel,
                       std::vector<std::string> recipients)
    : VictimApp(ledger, issuer_check),
      channel_(std::move(channel)),
      recipients_(std::move(recipients)) {}

void MailBridge::on_event(const Event& event, Platform& platform, const AppId& self) {
  if (event.kind != EventKind::message_posted || event.display.bot) return;
  if (!on_channel(event, platform, channel_) || ignored(event)) return;
  record(EmailSent{event.display.name, recipients_, event.text}, event, platform, self);
}

// ---------------------------------------------------------------- live chat

LiveChat::LiveChat(EffectLedger& ledger, bool issuer_check, std::string channel,
                   std::string visitor)
    : VictimApp(ledger, issuer_check), channel_(std::move(channel)), visitor_(std::move(visitor)) {}

void LiveChat::on_event(const Event& event, Platform& platform, const AppId& self) {
  if (event.kind != EventKind::message_posted || event.display.bot) return;
  if (!on_channel(event, platform, channel_) || ignored(event)) return;
  record(VisitorMessage{event.display.name, event.text, true}, event, platform, self);
}

void LiveChat::visitor_says(Platform& platform, const AppId& self, const std::string& text) {
  const Channel* ch = platform.workspace().channel_by_name(channel_);
  auto grant = platform.bot_grant(self);
  if (!ch || !grant) return;
  const std::size_t before = platform.events().size();
  auto posted = platform.post_message(*grant, ch->id, visitor_ + ": " + text);
  if (!posted || platform.events().size() <= before) return;
  record(VisitorMessage{visitor_, text, false}, platform.events()[before].event, platform, self);
}

// ---------------------------------------------------------------- repo bot

RepoBot::RepoBot(EffectLedger& ledger, bool issuer_check, std::string repo,
                 std::string account_key, std::vector<int> open_prs)
    : VictimApp(ledger, issuer_check),
      repo_(std::move(repo)),
      account_key_(std::move(account_key)),
      open_prs_(open_prs.begin(), open_prs.end()) {}

void RepoBot::on_event(const Event& event, Platform& platform, const AppId& self) {
  if (event.kind != EventKind::message_posted || event.display.bot || ignored(event)) return;
  const Channel* ch = platform.workspace().find_channel(event.channel);
  if (!ch || ch->kind != ChannelKind::direct) return;
  const std::string text = normalize(event.text);

  if (auto pr = word_after(text, "merge ")) {
    const bool numeric = std::all_of(pr->begin(), pr->end(), ::isdigit);
    if (!numeric || !open_prs_.contains(std::stoi(*pr))) {
      reply(platform, self, event.channel, "No open pull request " + *pr);
      return;
    }
    pending_[event.channel] = std::stoi(*pr);
    reply(platform, self, event.channel,
          "Merge pull request #" + *pr + " into " + repo_ + "? Reply yes to confirm.");
    return;
  }
  if (text == "yes" || text == "no") {
    auto it = pending_.find(event.channel);
    if (it == pending_.end()) return;
    const int pr = it->second;
    pending_.erase(it);
    if (text == "no") {
      reply(platform, self, event.channel, "Merge cancelled.");
      return;
    }
    auto account = linked_account(event, platform, account_key_);
    if (!account) return;
    open_prs_.erase(pr);
    record(PullRequestMerged{repo_, pr, *account}, event, platform, self);
    reply(platform, self, event.channel, "Merged pull request #" + std::to_string(pr) + ".");
    return;
  }
  if (text == "list") {
    std::string listing = "Open pull requests in " + repo_ + ":";
    for (int pr : open_prs_) listing += " #" + std::to_string(pr);
    reply(platform, self, event.channel, listing);
  }
}

// ---------------------------------------------------------------- flow runner

FlowRunner::FlowRunner(EffectLedger& ledger, bool issuer_check, std::string account_key,
                       std::vector<std::string> flows)
    : VictimApp(ledger, issuer_check),
      account_key_(std::move(account_key)),
      flows_(std::move(flows)) {}

void FlowRunner::on_event(const Event& event, Platform& platform, const AppId& self) {
  if (event.kind != EventKind::message_posted || event.display.bot || ignored(event)) return;
  const Channel* ch = platform.workspace().find_channel(event.channel);
  if (!ch || ch->kind != ChannelKind::direct) return;
  const std::string text = normalize(event.text);
  auto known = [&](const std::string& id) {
    return std::find(flows_.begin(), flows_.end(), id) != flows_.end();
  };

  if (auto id = word_after(text, "run flow ")) {
    auto account = linked_account(event, platform, account_key_);
    if (!known(*id) || !account) return;
    record(FlowExecuted{*account, *id}, event, platform, self);
    reply(platform, self, event.channel, "Flow " + *id + " started.");
  } else if (text == "list flows") {
    std::string listing = "Flows:";
    for (const auto& f : flows_) listing += " " + f;
    reply(platform, self, event.channel, listing);
  } else if (auto id = word_after(text, "describe flow ")) {
    if (known(*id)) reply(platform, self, event.channel, "Flow " + *id + ": scheduled workflow");
  }
}

// ---------------------------------------------------------------- tweet reactor

TweetReactor::TweetReactor(EffectLedger& ledger, bool issuer_check, std::string emoji,
                           std::string account_key)
    : VictimApp(ledger, issuer_check), emoji_(std::move(emoji)), account_key_(std::move(account_key)) {}

void TweetReactor::on_event(const Event& event, Platform& platform, const AppId& self) {
  if (event.kind != EventKind::reaction_added || !event.message || ignored(event)) return;
  std::string emoji = event.emoji;
  std::erase(emoji, ':');
  if (emoji != emoji_) return;
  auto grant = platform.bot_grant(self);
  if (!grant) return;
  auto message = platform.read_message(*grant, event.channel, *event.message);
  if (!message) return;
  auto account = linked_account(event, platform, account_key_);
  if (!account) return;
  for (const auto& url : extract_urls(message->text)) {
    const std::string host = url_host(url);
    const bool tweet = (host_matches_domain(host, "twitter.com") || host_matches_domain(host, "x.com")) &&
                       url.find("/status/") != std::string::npos;
    if (tweet) {
      record(Retweet{*account, url}, event, platform, self);
      return;
    }
  }
}

// ---------------------------------------------------------------- file indexer

FileIndexer::FileIndexer(EffectLedger& ledger, bool issuer_check, std::string account_key)
    : VictimApp(ledger, issuer_check), account_key_(std::move(account_key)) {}

void FileIndexer::on_event(const Event& event, Platform& platform, const AppId& self) {
  if (event.kind != EventKind::file_shared || !event.file || ignored(event)) return;
  auto account = linked_account(event, platform, account_key_);
  if (!account) return;
  const File* file = platform.workspace().find_file(*event.file);
  record(FileIndexed{*account, *event.file, file ? file->name : std::string{}}, event, platform,
         self);
}

// ---------------------------------------------------------------- video call

VideoCall::VideoCall(EffectLedger& ledger, bool issuer_check, std::string host_account)
    : VictimApp(ledger, issuer_check), host_account_(std::move(host_account)) {}

void VideoCall::on_event(const Event& event, Platform& platform, const AppId& self) {
  if (event.kind != EventKind::command_invoked || !event.invocation) return;
  record(MeetingStarted{host_account_, event.channel, event.display.name}, event, platform, self);
  ++meetings_;
  if (auto grant = platform.bot_grant(self)) {
    const std::string join = "https://zoom.us/j/" + std::to_string(9000000 + meetings_);
    (void)platform.respond_to_command(*grant, *event.invocation,
                                      event.display.name + " started a meeting: " + join);
  }
}

// ---------------------------------------------------------------- card renderer

std::optional<UnfurlCard> CardRenderer::render_unfurl(const std::string& url,
                                                      const Platform& platform,
                                                      const AppId& self) {
  const InstalledApp* app = platform.registry().find_app(self);
  if (!app) return std::nullopt;
  return UnfurlCard{title_ + ": " + url, app->manifest.name, app->manifest.icon};
}

// ---------------------------------------------------------------- factory

std::unique_ptr<AppBehavior> make_behavior(const std::string& kind, const std::string& config_json,
                                           EffectLedger& ledger, bool issuer_check) {
  const auto config = nlohmann::json::parse(config_json, nullptr, false);
  auto str = [&](const char* key, std::string fallback) {
    if (config.is_object() && config.contains(key) && config[key].is_string()) {
      return config[key].get<std::string>();
    }
    return fallback;
  };
  auto strings = [&](const char* key) {
    std::vector<std::string> out;
    if (config.is_object() && config.contains(key) && config[key].is_array()) {
      for (const auto& v : config[key]) {
        if (v.is_string()) out.push_back(v.get<std::string>());
      }
    }
    return out;
  };

  if (kind == "mail_bridge") {
    return std::make_unique<MailBridge>(ledger, issuer_check, str("channel", "mail-bridge"),
                                        strings("recipients"));
  }
  if (kind == "live_chat") {
    return std::make_unique<LiveChat>(ledger, issuer_check, str("channel", "support-chat"),
                                      str("visitor", "visitor"));
  }
  if (kind == "repo_bot") {
    std::vector<int> prs;
    if (config.is_object() && config.contains("open_prs") && config["open_prs"].is_array()) {
      for (const auto& v : config["open_prs"]) {
        if (v.is_number_integer()) prs.push_back(v.get<int>());
      }
    }
    return std::make_unique<RepoBot>(ledger, issuer_check, str("repo", "repo"),
                                     str("account_key", "bitbucket"), std::move(prs));
  }
  if (kind == "flow_runner") {
    return std::make_unique<FlowRunner>(ledger, issuer_check, str("account_key", "power_automate"),
                                        strings("flows"));
  }
  if (kind == "tweet_reactor") {
    return std::make_unique<TweetReactor>(ledger, issuer_check, str("emoji", "twitter"),
                                          str("account_key", "twitter"));
  }
  if (kind == "file_indexer") {
    return std::make_unique<FileIndexer>(ledger, issuer_check, str("account_key", "dokkio"));
  }
  if (kind == "video_call") {
    return std::make_unique<VideoCall>(ledger, issuer_check, str("host_account", "zoom:host"));
  }
  if (kind == "card_renderer") {
    return std::make_unique<CardRenderer>(str("title", "Preview"));
  }
  return nullptr;
}

BehaviorFactory victim_factory(EffectLedger& ledger, bool issuer_check) {
  return [&ledger, issuer_check](const BootstrapApp& app, const Platform&) {
    return make_behavior(app.behavior, app.config_json, ledger, issuer_check);
  };
}

}  // namespace bcpsim
