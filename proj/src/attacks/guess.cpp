#include "bcpsim/attacks/guess.hpp"

namespace bcpsim {

Result<std::vector<MessageId>> guess_candidate_ids(const IdAnchorPair& anchors) {
  const MessageId& a = anchors.first;
  const MessageId& b = anchors.second;
  if (b.counter < a.counter) {
    return make_error(Errc::invalid_anchors, "second anchor counter is below the first");
  }
  if (b.timestamp_s < a.timestamp_s) {
    return make_error(Errc::invalid_anchors, "second anchor is older than the first");
  }
  if (a.counter % MessageId::kCounterStep != 0 || b.counter % MessageId::kCounterStep != 0) {
    return make_error(Errc::invalid_anchors, "anchor counters must be multiples of 100");
  }
  std::vector<MessageId> out;
  if (b.counter - a.counter <= MessageId::kCounterStep) return out;
  const std::uint64_t steps = (b.counter - a.counter) / MessageId::kCounterStep - 1;
  out.reserve(static_cast<std::size_t>((b.timestamp_s - a.timestamp_s + 1) * steps));
  for (SimTime t = a.timestamp_s; t <= b.timestamp_s; ++t) {
    for (std::uint32_t c = a.counter + MessageId::kCounterStep; c < b.counter;
         c += MessageId::kCounterStep) {
      out.push_back(MessageId{t, c});
    }
  }
  return out;
}

}  // namespace bcpsim
