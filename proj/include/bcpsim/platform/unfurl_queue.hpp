#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "bcpsim/core/ids.hpp"
#include "bcpsim/core/message_id.hpp"

namespace bcpsim {

inline constexpr std::size_t kUnfurlsPerSecond = 5;

struct UnfurlJob {
  std::uint64_t seq = 0;
  ChannelId channel;  // carrier message location
  MessageId message;
  std::string url;
  SimTime enqueued_at = 0;
};

// FIFO of pending URL resolutions, drained at a fixed per-second budget.
class UnfurlQueue {
 public:
  explicit UnfurlQueue(std::size_t per_second = kUnfurlsPerSecond) : per_second_(per_second) {}

  void push(ChannelId channel, MessageId message, std::string url, SimTime now);
  // Jobs to resolve in one simulated second, oldest first.
  std::vector<UnfurlJob> take_for_second();

  bool empty() const noexcept { return jobs_.empty(); }
  std::size_t size() const noexcept { return jobs_.size(); }
  std::size_t per_second() const noexcept { return per_second_; }

 private:
  std::size_t per_second_;
  std::uint64_t next_seq_ = 0;
  std::deque<UnfurlJob> jobs_;
};

}  // namespace bcpsim
