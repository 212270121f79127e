#include "bcpsim/victims/ledger.hpp"

#include <array>
#include <stdexcept>

namespace bcpsim {

namespace {

constexpr std::array<std::string_view, 7> kKindNames = {
    "email_sent",   "pull_request_merged", "retweet",       "meeting_started",
    "file_indexed", "visitor_message",     "flow_executed",
};
constexpr std::array<std::string_view, 7> kDisplayNames = {
    "EmailSent",   "PullRequestMerged", "Retweet",      "MeetingStarted",
    "FileIndexed", "VisitorMessage",    "FlowExecuted",
};

}  // namespace

std::string_view to_string(EffectKind kind) { return kKindNames.at(static_cast<std::size_t>(kind)); }

std::string_view display_name(EffectKind kind) {
  return kDisplayNames.at(static_cast<std::size_t>(kind));
}

std::optional<EffectKind> parse_effect_kind(std::string_view text) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == text || kDisplayNames[i] == text) return static_cast<EffectKind>(i);
  }
  return std::nullopt;
}

std::string Effect::summary() const {
  struct Visitor {
    std::string operator()(const EmailSent& e) const {
      std::string to;
      for (const auto& r : e.recipients) to += (to.empty() ? "" : ",") + r;
      return "EmailSent author=" + e.author + " to=" + to + " body=\"" + e.body + "\"";
    }
    std::string operator()(const PullRequestMerged& e) const {
      return "PullRequestMerged repo=" + e.repo + " pr=" + std::to_string(e.pr) +
             " account=" + e.account;
    }
    std::string operator()(const Retweet& e) const {
      return "Retweet account=" + e.account + " tweet=" + e.tweet_url;
    }
    std::string operator()(const MeetingStarted& e) const {
      return "MeetingStarted host=" + e.host_account + " channel=" + e.channel.str() +
             " shown_as=" + e.started_by;
    }
    std::string operator()(const FileIndexed& e) const {
      return "FileIndexed account=" + e.account + " file=" + e.file.str();
    }
    std::string operator()(const VisitorMessage& e) const {
      return std::string("VisitorMessage ") + (e.to_visitor ? "to" : "from") +
             " visitor author=" + e.author + " body=\"" + e.body + "\"";
    }
    std::string operator()(const FlowExecuted& e) const {
      return "FlowExecuted account=" + e.account + " flow=" + e.flow;
    }
  };
  return std::visit(Visitor{}, payload);
}

nlohmann::json to_json(const Effect& effect) {
  using nlohmann::json;
  json fields;
  std::visit(
      [&](const auto& e) {
        using T = std::decay_t<decltype(e)>;
        if constexpr (std::is_same_v<T, EmailSent>) {
          fields = {{"author", e.author}, {"recipients", e.recipients}, {"body", e.body}};
        } else if constexpr (std::is_same_v<T, PullRequestMerged>) {
          fields = {{"repo", e.repo}, {"pr", e.pr}, {"account", e.account}};
        } else if constexpr (std::is_same_v<T, Retweet>) {
          fields = {{"account", e.account}, {"tweet_url", e.tweet_url}};
        } else if constexpr (std::is_same_v<T, MeetingStarted>) {
          fields = {{"host_account", e.host_account},
                    {"channel", e.channel.str()},
                    {"started_by", e.started_by}};
        } else if constexpr (std::is_same_v<T, FileIndexed>) {
          fields = {{"account", e.account}, {"file", e.file.str()}, {"name", e.name}};
        } else if constexpr (std::is_same_v<T, VisitorMessage>) {
          fields = {{"author", e.author}, {"body", e.body}, {"to_visitor", e.to_visitor}};
        } else {
          fields = {{"account", e.account}, {"flow", e.flow}};
        }
      },
      effect.payload);
  return json{{"kind", std::string(display_name(effect.kind()))},
              {"caused_by", effect.caused_by.value},
              {"at", effect.at},
              {"app", effect.app.str()},
              {"fields", fields}};
}

void EffectLedger::append(Effect effect) {
  if (effect.caused_by.value == 0) {
    throw std::invalid_argument("effect without a triggering event");
  }
  entries_.push_back(std::move(effect));
}

std::size_t EffectLedger::count(EffectKind kind) const {
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.kind() == kind ? 1 : 0;
  return n;
}

std::vector<const Effect*> EffectLedger::since(std::size_t mark) const {
  std::vector<const Effect*> out;
  for (std::size_t i = mark; i < entries_.size(); ++i) out.push_back(&entries_[i]);
  return out;
}

}  // namespace bcpsim
