#pragma once

#include <compare>
#include <cstdint>
#include <string>
#include <utility>

namespace bcpsim {

// String identifier tagged with the kind of entity it names, so a channel id
// cannot be passed where a user id is expected.
template <class Tag>
class Id {
 public:
  Id() = default;
  explicit Id(std::string value) : value_(std::move(value)) {}

  const std::string& str() const noexcept { return value_; }
  bool empty() const noexcept { return value_.empty(); }

  friend bool operator==(const Id&, const Id&) = default;
  friend auto operator<=>(const Id&, const Id&) = default;

 private:
  std::string value_;
};

// Monotonic sequence number tagged the same way.
template <class Tag>
struct Seq {
  std::uint64_t value = 0;

  friend bool operator==(const Seq&, const Seq&) = default;
  friend auto operator<=>(const Seq&, const Seq&) = default;
};

using UserId = Id<struct UserTag>;
using AppId = Id<struct AppTag>;
using ChannelId = Id<struct ChannelTag>;
using FileId = Id<struct FileTag>;

using GrantId = Seq<struct GrantTag>;
using EventId = Seq<struct EventTag>;
using ScheduledId = Seq<struct ScheduledTag>;
using InvocationId = Seq<struct InvocationTag>;

// Simulated wall clock: integral seconds since the UNIX epoch.
using SimTime = std::uint64_t;

}  // namespace bcpsim
