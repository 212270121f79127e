#include "bcpsim/core/message_id.hpp"

#include <cstdio>
#include <stdexcept>

namespace bcpsim {

std::string MessageId::str() const {
  if (timestamp_s > kMaxTimestamp || counter > kMaxCounter) {
    throw std::out_of_range("message id does not fit 10+7 digits");
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%010llu%07u", static_cast<unsigned long long>(timestamp_s),
                static_cast<unsigned>(counter));
  return buf;
}

std::optional<MessageId> MessageId::parse(std::string_view digits) {
  if (digits.size() != 17) return std::nullopt;
  for (char c : digits) {
    if (c < '0' || c > '9') return std::nullopt;
  }
  MessageId id;
  for (std::size_t i = 0; i < 10; ++i) id.timestamp_s = id.timestamp_s * 10 + (digits[i] - '0');
  for (std::size_t i = 10; i < 17; ++i) id.counter = id.counter * 10 + (digits[i] - '0');
  if (id.counter % kCounterStep != 0) return std::nullopt;
  return id;
}

std::string_view to_string(PostAction action) {
  switch (action) {
    case PostAction::user_text: return "user_text";
    case PostAction::app_text: return "app_text";
    case PostAction::file_only: return "file_only";
    case PostAction::draft_save: return "draft_save";
  }
  return "?";
}

std::uint32_t CounterIncrements::for_action(PostAction action) const {
  switch (action) {
    case PostAction::user_text: return user_text;
    case PostAction::app_text: return app_text;
    case PostAction::file_only: return file_only;
    case PostAction::draft_save: return draft_save;
  }
  return user_text;
}

MessageId MessageCounter::advance(PostAction action, SimTime now,
                                  const CounterIncrements& increments) {
  if (active_ && now < last_activity_) {
    throw std::invalid_argument("message counter cannot move backwards in time");
  }
  if (!active_ || now - last_activity_ > kCounterResetWindow) {
    value_ = 0;
  } else {
    const std::uint64_t next = static_cast<std::uint64_t>(value_) + increments.for_action(action);
    if (next > MessageId::kMaxCounter) throw std::overflow_error("message counter overflow");
    value_ = static_cast<std::uint32_t>(next);
  }
  active_ = true;
  last_activity_ = now;
  return MessageId{now, value_};
}

}  // namespace bcpsim
