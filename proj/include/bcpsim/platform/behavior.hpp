#pragma once

#include <optional>
#include <string>

#include "bcpsim/core/ids.hpp"
#include "bcpsim/platform/event.hpp"

namespace bcpsim {

class Platform;

struct UnfurlCard {
  std::string content;
  std::string name;
  std::string icon;
};

// Code run by an installed app in response to platform events.
class AppBehavior {
 public:
  virtual ~AppBehavior() = default;

  virtual void on_event(const Event& event, Platform& platform, const AppId& self) = 0;

  // Card for a URL on a domain this app registered.
  virtual std::optional<UnfurlCard> render_unfurl(const std::string& url, const Platform& platform,
                                                  const AppId& self) {
    (void)url;
    (void)platform;
    (void)self;
    return std::nullopt;
  }
};

}  // namespace bcpsim
