#pragma once

#include <vector>

#include "bcpsim/core/message_id.hpp"
#include "bcpsim/error.hpp"

namespace bcpsim {

// Two valid ids from one channel, the second observed later.
struct IdAnchorPair {
  MessageId first;   // (t0, c0)
  MessageId second;  // (t0 + tau, c1)

  SimTime tau() const { return second.timestamp_s - first.timestamp_s; }
};

// Every id strictly between the anchors that the counter rules allow:
// {t0..t0+tau} x {c0+100..c1-100}, ordered by timestamp then counter.
// InvalidAnchors when c1 < c0 or the second anchor is older.
Result<std::vector<MessageId>> guess_candidate_ids(const IdAnchorPair& anchors);

}  // namespace bcpsim
