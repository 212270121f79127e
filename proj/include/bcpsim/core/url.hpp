#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "bcpsim/core/ids.hpp"
#include "bcpsim/core/message_id.hpp"
#include "bcpsim/error.hpp"

namespace bcpsim {

// https://<workspace>.slack.com/archives/<channel-id>/p<17-digit-id>
struct MessageUrl {
  std::string workspace;
  ChannelId channel;
  MessageId message;

  friend bool operator==(const MessageUrl&, const MessageUrl&) = default;
};

// https://<workspace>.slack.com/files/<uploader>/<file-id>
struct FileUrl {
  std::string workspace;
  UserId uploader;
  FileId file;

  friend bool operator==(const FileUrl&, const FileUrl&) = default;
};

struct ExternalUrl {
  std::string url;
  std::string host;

  friend bool operator==(const ExternalUrl&, const ExternalUrl&) = default;
};

using LinkTarget = std::variant<MessageUrl, FileUrl, ExternalUrl>;

inline constexpr std::size_t kMaxUrlsPerMessage = 20;

std::string format_message_url(std::string_view workspace, const ChannelId& channel,
                               const MessageId& message);
Result<MessageUrl> parse_message_url(std::string_view url);

std::string format_file_url(std::string_view workspace, const UserId& uploader,
                            const FileId& file);
Result<FileUrl> parse_file_url(std::string_view url);

// Direct-download reference handed out when a file URL is unfurled.
std::string format_download_url(std::string_view workspace, const FileId& file);

// Lower-cased host of an http(s) URL, or empty.
std::string url_host(std::string_view url);

// nullopt for anything that is not an http(s) URL.
std::optional<LinkTarget> classify_url(std::string_view url);

// Whitespace-separated http(s) tokens in order of appearance, at most `cap`.
std::vector<std::string> extract_urls(std::string_view text, std::size_t cap = kMaxUrlsPerMessage);

// True if `host` equals `domain` or is a subdomain of it.
bool host_matches_domain(std::string_view host, std::string_view domain);

}  // namespace bcpsim
