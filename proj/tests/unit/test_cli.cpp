#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>

#include <json.hpp>

#include "../support.hpp"
#include "bcpsim/cli/cli.hpp"

using namespace bcpsim;
using namespace bcpsim::test;

namespace {

struct Out {
  int code = -1;
  std::string out, err;
};

Out cli(std::vector<std::string> args) {
  std::ostringstream o, e;
  Out r;
  r.code = run_cli(args, o, e);
  r.out = o.str();
  r.err = e.str();
  return r;
}

std::filesystem::path tmp(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("bcpsim_cli_" + name);
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

// First trace in a JSON-lines log whose fields satisfy `pick`.
std::string find_trace(const std::filesystem::path& log,
                       const std::function<bool(const nlohmann::json&)>& pick) {
  std::ifstream in(log);
  for (std::string line; std::getline(in, line);) {
    auto j = nlohmann::json::parse(line);
    if (pick(j)) return j.at("trace_id").get<std::string>();
  }
  return {};
}

}  // namespace

TEST_CASE("run exit codes follow the assertions") {
  CHECK(cli({"run", "-s", "unfurl_extraction", "--assert", "verdict=Succeeded"}).code == kExitOk);
  CHECK(cli({"run", "-s", "unfurl_extraction", "--cm", "C2", "--assert", "verdict=Blocked"}).code ==
        kExitOk);
  auto miss = cli({"run", "-s", "unfurl_extraction", "--cm", "C2", "--assert", "verdict=Succeeded"});
  CHECK(miss.code == kExitAssertion);
  CHECK(miss.out.find("FAIL") != std::string::npos);
}

TEST_CASE("configuration errors exit 2") {
  CHECK(cli({"run", "-s", "delegation", "-w", "/no/such/workspace.json"}).code == kExitConfig);
  CHECK(cli({"run", "-s", "delegation", "--cm", "C9"}).code == kExitConfig);
  CHECK(cli({"run", "-s", "delegation", "--assert", "verdict=Maybe"}).code == kExitConfig);
  CHECK(cli({"run", "-s", "no_such_scenario"}).code == kExitConfig);
  CHECK(cli({"run", "-s", "pin_extraction", "-p", "teams"}).code == kExitConfig);
  CHECK(cli({"run"}).code == kExitConfig);
  CHECK(cli({"audit", (fixture("desk") / "zoom.json").string()}).code == kExitConfig);
  CHECK(cli({"frobnicate"}).code == kExitConfig);
}

TEST_CASE("audit and list-scenarios") {
  auto a = cli({"audit", fixture("desk").string()});
  CHECK(a.code == kExitOk);
  CHECK(a.out.find("apps: 10") != std::string::npos);
  auto s = cli({"audit", fixture("desk").string(), "--format", "structured"});
  REQUIRE(s.code == kExitOk);
  std::istringstream lines(s.out);
  std::string first;
  std::getline(lines, first);
  CHECK(nlohmann::json::parse(first).at("record") == "audit");

  auto l = cli({"list-scenarios"});
  CHECK(l.code == kExitOk);
  CHECK(std::count(l.out.begin(), l.out.end(), '\n') == 8);
}

TEST_CASE("explain walks an allow and a deny") {
  const auto log = tmp("traces.jsonl");
  REQUIRE(cli({"run", "-s", "unfurl_extraction", "--trace-log", log.string()}).code == kExitOk);
  const std::string crossed = find_trace(log, [](const nlohmann::json& j) {
    return j.at("op") == "read_attachment" && !j.at("provenance_crossed").is_null();
  });
  REQUIRE(!crossed.empty());
  auto e = cli({"explain", "--trace-log", log.string(), crossed});
  CHECK(e.code == kExitOk);
  CHECK(e.out.find("im:history") != std::string::npos);
  CHECK(e.out.find("crossed") != std::string::npos);
  CHECK(cli({"explain", "--trace-log", log.string(), "unfurl_extraction#999999"}).code ==
        kExitConfig);

  const auto spec = tmp("deny.json");
  std::ofstream(spec) << R"({"builtin": "unfurl_extraction",
                             "options": {"grant": ["chat:write", "im:history"]}})";
  const auto deny_log = tmp("deny.jsonl");
  REQUIRE(cli({"run", "-s", spec.string(), "--trace-log", deny_log.string()}).code == kExitOk);
  const std::string denied =
      find_trace(deny_log, [](const nlohmann::json& j) { return j.at("decision") == "deny"; });
  REQUIRE(!denied.empty());
  auto d = cli({"explain", "--trace-log", deny_log.string(), denied});
  CHECK(d.code == kExitOk);
  CHECK(d.out.find("groups:read missing") != std::string::npos);
  CHECK(d.out.find("missing_scope") != std::string::npos);
  for (const auto& p : {log, spec, deny_log}) std::filesystem::remove(p);
}

TEST_CASE("identical configurations give byte-identical logs") {
  std::string first_traces, first_report;
  for (int round = 0; round < 2; ++round) {
    const auto t = tmp("det_traces.jsonl");
    const auto r = tmp("det_report.jsonl");
    REQUIRE(cli({"run", "-s", "unfurl_extraction", "-s", "pin_extraction", "--seed", "4",
                 "--trace-log", t.string(), "--report", r.string()})
                .code == kExitOk);
    if (round == 0) {
      first_traces = slurp(t);
      first_report = slurp(r);
      CHECK(!first_traces.empty());
    } else {
      CHECK(slurp(t) == first_traces);
      CHECK(slurp(r) == first_report);
    }
    std::filesystem::remove(t);
    std::filesystem::remove(r);
  }
}

TEST_CASE("the seed can come from the environment") {
  auto seed_of = [](const Out& o) {
    return nlohmann::json::parse(o.out.substr(0, o.out.find('\n'))).at("seed").get<std::uint64_t>();
  };
  ::setenv("BCPSIM_SEED", "77", 1);
  auto env = cli({"run", "-s", "delegation", "--format", "structured"});
  auto flag = cli({"run", "-s", "delegation", "--format", "structured", "--seed", "5"});
  ::unsetenv("BCPSIM_SEED");
  REQUIRE(env.code == kExitOk);
  CHECK(seed_of(env) == 77);
  CHECK(seed_of(flag) == 5);
  ::setenv("BCPSIM_SEED", "many", 1);
  CHECK(cli({"run", "-s", "delegation"}).code == kExitConfig);
  ::unsetenv("BCPSIM_SEED");
}

TEST_CASE("repeated scenarios get distinct labels") {
  auto o = cli({"run", "-s", "delegation", "-s", "delegation", "--format", "structured"});
  REQUIRE(o.code == kExitOk);
  std::istringstream lines(o.out);
  std::vector<std::string> labels;
  for (std::string line; std::getline(lines, line);) {
    labels.push_back(nlohmann::json::parse(line).at("label"));
  }
  CHECK(labels == std::vector<std::string>{"delegation", "delegation-2"});
}

TEST_CASE("help exits 0") {
  CHECK(cli({"--help"}).code == kExitOk);
  CHECK(cli({"run", "--help"}).code == kExitOk);
}
