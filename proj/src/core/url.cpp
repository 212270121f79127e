#include "bcpsim/core/url.hpp"

#include <algorithm>
#include <cctype>

namespace bcpsim {

namespace {

constexpr std::string_view kScheme = "https://";
constexpr std::string_view kHostSuffix = ".slack.com";

bool is_workspace_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
}

bool is_id_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

bool all_of(std::string_view s, bool (*pred)(char)) {
  return !s.empty() && std::all_of(s.begin(), s.end(), pred);
}

// Splits "https://<ws>.slack.com/<rest>" into workspace and rest.
std::optional<std::pair<std::string_view, std::string_view>> split_slack_url(
    std::string_view url) {
  if (!url.starts_with(kScheme)) return std::nullopt;
  url.remove_prefix(kScheme.size());
  const auto slash = url.find('/');
  if (slash == std::string_view::npos) return std::nullopt;
  std::string_view host = url.substr(0, slash);
  if (!host.ends_with(kHostSuffix)) return std::nullopt;
  std::string_view workspace = host.substr(0, host.size() - kHostSuffix.size());
  if (!all_of(workspace, is_workspace_char)) return std::nullopt;
  return std::make_pair(workspace, url.substr(slash + 1));
}

}  // namespace

std::string format_message_url(std::string_view workspace, const ChannelId& channel,
                               const MessageId& message) {
  std::string out(kScheme);
  out += workspace;
  out += kHostSuffix;
  out += "/archives/";
  out += channel.str();
  out += "/p";
  out += message.str();
  return out;
}

Result<MessageUrl> parse_message_url(std::string_view url) {
  const auto bad = [&](std::string_view why) {
    return make_error(Errc::malformed_url, std::string(why) + ": " + std::string(url));
  };
  auto parts = split_slack_url(url);
  if (!parts) return bad("not a workspace URL");
  auto [workspace, rest] = *parts;
  constexpr std::string_view kArchives = "archives/";
  if (!rest.starts_with(kArchives)) return bad("missing archives path");
  rest.remove_prefix(kArchives.size());
  const auto slash = rest.find('/');
  if (slash == std::string_view::npos) return bad("missing message component");
  std::string_view channel = rest.substr(0, slash);
  std::string_view tail = rest.substr(slash + 1);
  if (!all_of(channel, is_id_char)) return bad("bad channel id");
  if (!tail.starts_with('p')) return bad("missing 'p' prefix");
  auto id = MessageId::parse(tail.substr(1));
  if (!id) return bad("message id is not 17 digits");
  return MessageUrl{std::string(workspace), ChannelId(std::string(channel)), *id};
}

std::string format_file_url(std::string_view workspace, const UserId& uploader,
                            const FileId& file) {
  std::string out(kScheme);
  out += workspace;
  out += kHostSuffix;
  out += "/files/";
  out += uploader.str();
  out += "/";
  out += file.str();
  return out;
}

Result<FileUrl> parse_file_url(std::string_view url) {
  auto parts = split_slack_url(url);
  const auto bad = make_error(Errc::malformed_url, "not a file URL: " + std::string(url));
  if (!parts) return bad;
  auto [workspace, rest] = *parts;
  constexpr std::string_view kFiles = "files/";
  if (!rest.starts_with(kFiles)) return bad;
  rest.remove_prefix(kFiles.size());
  const auto slash = rest.find('/');
  if (slash == std::string_view::npos) return bad;
  std::string_view uploader = rest.substr(0, slash);
  std::string_view file = rest.substr(slash + 1);
  if (!all_of(uploader, is_id_char) || !all_of(file, is_id_char)) return bad;
  return FileUrl{std::string(workspace), UserId(std::string(uploader)), FileId(std::string(file))};
}

std::string format_download_url(std::string_view workspace, const FileId& file) {
  std::string out = "https://files.slack.com/files-pri/";
  out += workspace;
  out += "-";
  out += file.str();
  out += "/download";
  return out;
}

std::string url_host(std::string_view url) {
  std::size_t start;
  if (url.starts_with("https://")) {
    start = 8;
  } else if (url.starts_with("http://")) {
    start = 7;
  } else {
    return {};
  }
  std::string_view rest = url.substr(start);
  const auto end = rest.find_first_of("/?#:");
  std::string host(rest.substr(0, end));
  std::transform(host.begin(), host.end(), host.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return host;
}

std::optional<LinkTarget> classify_url(std::string_view url) {
  if (auto m = parse_message_url(url)) return LinkTarget{std::move(m).value()};
  if (auto f = parse_file_url(url)) return LinkTarget{std::move(f).value()};
  std::string host = url_host(url);
  if (host.empty()) return std::nullopt;
  return LinkTarget{ExternalUrl{std::string(url), std::move(host)}};
}

std::vector<std::string> extract_urls(std::string_view text, std::size_t cap) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size() && out.size() < cap) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    std::string_view token = text.substr(i, j - i);
    if (token.starts_with("https://") || token.starts_with("http://")) {
      out.emplace_back(token);
    }
    i = j;
  }
  return out;
}

bool host_matches_domain(std::string_view host, std::string_view domain) {
  if (domain.empty()) return false;
  if (host == domain) return true;
  return host.size() > domain.size() && host.ends_with(domain) &&
         host[host.size() - domain.size() - 1] == '.';
}

}  // namespace bcpsim
