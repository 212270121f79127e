#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "bcpsim/core/ids.hpp"

namespace bcpsim {

// 17-digit message identifier: 10-digit epoch seconds followed by a
// zero-padded 7-digit per-channel counter.
struct MessageId {
  std::uint64_t timestamp_s = 0;
  std::uint32_t counter = 0;

  static constexpr std::uint64_t kMaxTimestamp = 9'999'999'999ULL;
  static constexpr std::uint32_t kMaxCounter = 9'999'999U;
  static constexpr std::uint32_t kCounterStep = 100;

  std::string str() const;
  // Exactly 17 ASCII digits; counter must be a multiple of 100.
  static std::optional<MessageId> parse(std::string_view digits);

  friend bool operator==(const MessageId&, const MessageId&) = default;
  friend auto operator<=>(const MessageId&, const MessageId&) = default;
};

enum class PostAction { user_text, app_text, file_only, draft_save };

std::string_view to_string(PostAction action);

// Counter increment per action kind. Only fixed increments are modeled.
struct CounterIncrements {
  std::uint32_t user_text = 200;
  std::uint32_t app_text = 100;
  std::uint32_t file_only = 100;
  std::uint32_t draft_save = 100;

  std::uint32_t for_action(PostAction action) const;
};

inline constexpr SimTime kCounterResetWindow = 5 * 24 * 60 * 60;  // 432000 s

// Per-channel message counter.
class MessageCounter {
 public:
  // Allocates the id for an action at `now`. After more than
  // kCounterResetWindow seconds of inactivity (or on first use) the counter
  // restarts at 0; otherwise it advances by the action's increment.
  MessageId advance(PostAction action, SimTime now, const CounterIncrements& increments);

  std::uint32_t value() const noexcept { return value_; }
  SimTime last_activity() const noexcept { return last_activity_; }
  bool active() const noexcept { return active_; }

 private:
  std::uint32_t value_ = 0;
  SimTime last_activity_ = 0;
  bool active_ = false;
};

}  // namespace bcpsim
