#include "bcpsim/platform/unfurl_queue.hpp"

namespace bcpsim {

void UnfurlQueue::push(ChannelId channel, MessageId message, std::string url, SimTime now) {
  jobs_.push_back(UnfurlJob{++next_seq_, std::move(channel), message, std::move(url), now});
}

std::vector<UnfurlJob> UnfurlQueue::take_for_second() {
  std::vector<UnfurlJob> out;
  while (!jobs_.empty() && out.size() < per_second_) {
    out.push_back(std::move(jobs_.front()));
    jobs_.pop_front();
  }
  return out;
}

}  // namespace bcpsim
