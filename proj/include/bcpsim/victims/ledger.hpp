#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bcpsim/core/ids.hpp"

namespace bcpsim {

struct EmailSent {
  std::string author;
  std::vector<std::string> recipients;
  std::string body;
};
struct PullRequestMerged {
  std::string repo;
  int pr = 0;
  std::string account;
};
struct Retweet {
  std::string account;
  std::string tweet_url;
};
struct MeetingStarted {
  std::string host_account;
  ChannelId channel;
  std::string started_by;
};
struct FileIndexed {
  std::string account;
  FileId file;
  std::string name;
};
struct VisitorMessage {
  std::string author;
  std::string body;
  bool to_visitor = true;
};
struct FlowExecuted {
  std::string account;
  std::string flow;
};

using EffectPayload = std::variant<EmailSent, PullRequestMerged, Retweet, MeetingStarted,
                                   FileIndexed, VisitorMessage, FlowExecuted>;

enum class EffectKind {
  email_sent,
  pull_request_merged,
  retweet,
  meeting_started,
  file_indexed,
  visitor_message,
  flow_executed,
};

std::string_view to_string(EffectKind kind);
std::optional<EffectKind> parse_effect_kind(std::string_view text);  // "EmailSent" or "email_sent"
std::string_view display_name(EffectKind kind);                       // "EmailSent"

struct Effect {
  EffectPayload payload;
  EventId caused_by;
  SimTime at = 0;
  AppId app;

  EffectKind kind() const { return static_cast<EffectKind>(payload.index()); }
  std::string summary() const;
};

nlohmann::json to_json(const Effect& effect);

// Append-only record of external-world side effects.
class EffectLedger {
 public:
  // Throws std::invalid_argument when caused_by is unset.
  void append(Effect effect);

  const std::vector<Effect>& entries() const noexcept { return entries_; }
  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t count(EffectKind kind) const;
  std::vector<const Effect*> since(std::size_t mark) const;

 private:
  std::vector<Effect> entries_;
};

}  // namespace bcpsim
