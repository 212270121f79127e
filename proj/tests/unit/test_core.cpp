#include <doctest.h>

#include <random>

#include "../oracles.hpp"
#include "bcpsim/core/bootstrap.hpp"
#include "bcpsim/core/message_id.hpp"
#include "bcpsim/core/url.hpp"
#include "bcpsim/core/workspace.hpp"

using namespace bcpsim;

TEST_CASE("message id formatting is 17 digits and round-trips") {
  const MessageId id{1616600000, 4200};
  CHECK(id.str() == "16166000000004200");
  CHECK(MessageId::parse(id.str()) == id);
  CHECK_FALSE(MessageId::parse("1616600000000420"));    // 16 digits
  CHECK_FALSE(MessageId::parse("16166000000004250"));   // counter not a multiple of 100
  CHECK_FALSE(MessageId::parse("1616600000000420x"));
}

TEST_CASE("message URL parse after format is the identity") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<std::uint64_t> ts(1'000'000'000ULL, MessageId::kMaxTimestamp);
  std::uniform_int_distribution<std::uint32_t> ctr(0, MessageId::kMaxCounter / 100);
  const char* alnum = "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789";
  for (int i = 0; i < 500; ++i) {
    std::string ws = "ws" + std::to_string(i % 37);
    std::string ch = "C";
    for (int k = 0; k < 9; ++k) ch += alnum[rng() % 36];
    const MessageId id{ts(rng), ctr(rng) * 100};
    const std::string url = format_message_url(ws, ChannelId(ch), id);
    auto back = parse_message_url(url);
    REQUIRE(back.ok());
    CHECK(back->workspace == ws);
    CHECK(back->channel == ChannelId(ch));
    CHECK(back->message == id);
  }
  CHECK(parse_message_url("https://acme.slack.com/archives/C1/p123").is(Errc::malformed_url));
  CHECK(parse_message_url("not a url").is(Errc::malformed_url));
}

TEST_CASE("file URLs round-trip and classify") {
  const std::string url = format_file_url("acme", UserId("U0ALICE"), FileId("F0123456789"));
  auto f = parse_file_url(url);
  REQUIRE(f.ok());
  CHECK(f->uploader == UserId("U0ALICE"));
  CHECK(f->file == FileId("F0123456789"));
  CHECK(std::holds_alternative<FileUrl>(*classify_url(url)));
  CHECK(std::holds_alternative<ExternalUrl>(*classify_url("https://lucid.app/d/1")));
  CHECK_FALSE(classify_url("ftp://x"));
  CHECK(host_matches_domain("docs.lucid.app", "lucid.app"));
  CHECK_FALSE(host_matches_domain("notlucid.app", "lucid.app"));
}

TEST_CASE("URL extraction caps at 20 per message") {
  std::string text;
  for (int i = 0; i < 30; ++i) text += "https://x.example/" + std::to_string(i) + " ";
  CHECK(extract_urls(text).size() == kMaxUrlsPerMessage);
  CHECK(extract_urls("see https://a.example, and http://b.example").size() == 2);
}

TEST_CASE("attachments never exceed 8001 characters") {
  for (std::size_t n : {0, 1, 8000, 8001, 8002, 40000}) {
    Attachment a = make_attachment(std::string(n, 'x'), "bob", ExternalOrigin{"https://e"});
    CHECK(a.content.size() == std::min<std::size_t>(n, kMaxAttachmentChars));
    CHECK(a.truncated == (n > kMaxAttachmentChars));
  }
}

TEST_CASE("counter deltas follow the action table") {
  MessageCounter c;
  CounterIncrements inc;
  CHECK(c.advance(PostAction::user_text, 100, inc).counter == 0);
  CHECK(c.advance(PostAction::user_text, 101, inc).counter == 200);
  CHECK(c.advance(PostAction::app_text, 101, inc).counter == 300);
  CHECK(c.advance(PostAction::file_only, 102, inc).counter == 400);
  CHECK(c.advance(PostAction::draft_save, 103, inc).counter == 500);
  CHECK(c.advance(PostAction::user_text, 103 + kCounterResetWindow, inc).counter == 700);
  CHECK(c.advance(PostAction::user_text, 104 + 2 * kCounterResetWindow, inc).counter == 0);
  CHECK_THROWS(c.advance(PostAction::user_text, 50, inc));
}

TEST_CASE("counter is strictly increasing without resets and matches the hand replay") {
  std::mt19937_64 rng(3);
  MessageCounter counter;
  test::CounterOracle oracle;
  CounterIncrements inc;
  SimTime now = 1000;
  std::uint32_t prev = 0;
  for (int i = 0; i < 400; ++i) {
    now += rng() % 50;
    const int k = static_cast<int>(rng() % 4);
    const auto id = counter.advance(static_cast<PostAction>(k), now, inc);
    CHECK(id.counter % 100 == 0);
    CHECK(id.counter == oracle.step("c", static_cast<test::CounterOracle::Act>(k), now));
    if (i > 0) CHECK(id.counter > prev);
    prev = id.counter;
  }
}

TEST_CASE("increment table is configurable per workspace") {
  Workspace ws("w", 1);
  ws.add_user(UserId("U1"), "u");
  const ChannelId c = ws.add_channel("c", ChannelKind::public_channel, {UserId("U1")});
  ws.increments().user_text = 300;
  ws.next_message_id(c, PostAction::user_text, 10);
  CHECK(ws.next_message_id(c, PostAction::user_text, 11).counter == 300);
}

TEST_CASE("default bootstrap parses and builds") {
  const Bootstrap& b = default_bootstrap();
  CHECK(b.users.size() >= 3);
  auto ws = build_workspace(b, 1);
  REQUIRE(ws.ok());
  CHECK(ws->channel_by_name("secret-plans")->kind == ChannelKind::private_channel);
  CHECK(parse_bootstrap("{").is(Errc::invalid_argument));
}

TEST_CASE("channel ids come from the seed") {
  auto a = build_workspace(default_bootstrap(), 1);
  auto b = build_workspace(default_bootstrap(), 1);
  auto c = build_workspace(default_bootstrap(), 2);
  REQUIRE((a.ok() && b.ok() && c.ok()));
  CHECK(a->channel_by_name("general")->id == b->channel_by_name("general")->id);
  CHECK(a->channel_by_name("general")->id != c->channel_by_name("general")->id);
}
