#include "bcpsim/cli/cli.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "bcpsim/attacks/scenario.hpp"
#include "bcpsim/attacks/scenario_file.hpp"
#include "bcpsim/audit/audit.hpp"
#include "bcpsim/core/bootstrap.hpp"
#include "bcpsim/permission/trace.hpp"

namespace bcpsim {

namespace {

struct RunConfig {
  std::string workspace;
  std::vector<std::string> scenarios;
  std::string variant;
  std::string profile = "slack";
  std::vector<std::string> countermeasures;
  std::uint64_t seed = 1;
  std::string report;
  std::string trace_log;
  std::string event_log;
  std::vector<std::string> asserts;
  std::string format = "table";
  bool anchor_fallback = false;
  bool minimality = false;
};

struct ConfigError {
  std::string message;
};

// Output sink: a file, or `fallback` for "-".
class Sink {
 public:
  Sink(const std::string& path, std::ostream& fallback) {
    if (path.empty()) return;
    if (path == "-") {
      os_ = &fallback;
      return;
    }
    file_ = std::make_unique<std::ofstream>(path, std::ios::binary | std::ios::trunc);
    if (!*file_) throw ConfigError{"cannot write " + path};
    os_ = file_.get();
  }
  explicit operator bool() const { return os_ != nullptr; }
  void line(const nlohmann::json& j) { *os_ << j.dump() << "\n"; }
  void flush() {
    if (os_) os_->flush();
  }

 private:
  std::unique_ptr<std::ofstream> file_;
  std::ostream* os_ = nullptr;
};

PolicyProfile build_profile(const RunConfig& cfg) {
  auto platform = parse_platform(cfg.profile);
  if (!platform) throw ConfigError{"unknown profile \"" + cfg.profile + "\" (slack or teams)"};
  PolicyProfile profile = PolicyProfile::baseline(*platform);
  for (const auto& group : cfg.countermeasures) {
    std::stringstream ss(group);
    for (std::string flag; std::getline(ss, flag, ',');) {
      if (flag.empty()) continue;
      if (auto st = apply_countermeasure_flag(profile, flag); !st) {
        throw ConfigError{st.error().message()};
      }
    }
  }
  return profile;
}

std::vector<ScenarioSpec> resolve_scenarios(const RunConfig& cfg) {
  std::vector<ScenarioSpec> out;
  for (const auto& name : cfg.scenarios) {
    if (const ScenarioInfo* info = find_scenario(name)) {
      ScenarioSpec s;
      s.name = info->name;
      s.source = "built-in";
      s.builtin = info->name;
      s.variant = cfg.variant;
      out.push_back(std::move(s));
      continue;
    }
    std::error_code ec;
    if (!std::filesystem::is_regular_file(name, ec)) {
      throw ConfigError{"\"" + name + "\" is neither a built-in scenario nor a file"};
    }
    auto specs = load_scenario_file(name);
    if (!specs) throw ConfigError{specs.error().message()};
    for (auto& s : specs.value()) {
      if (!cfg.variant.empty() && s.variant.empty()) s.variant = cfg.variant;
      out.push_back(s);
    }
  }
  return out;
}

int cmd_run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  try {
    const PolicyProfile profile = build_profile(cfg);
    Bootstrap bootstrap = default_bootstrap();
    if (!cfg.workspace.empty()) {
      auto b = load_bootstrap_file(cfg.workspace);
      if (!b) throw ConfigError{b.error().message()};
      bootstrap = std::move(b).value();
    }
    std::vector<Assertion> cli_asserts;
    for (const auto& a : cfg.asserts) {
      auto parsed = parse_assertion(a);
      if (!parsed) throw ConfigError{parsed.error().message()};
      cli_asserts.push_back(*parsed);
    }
    const auto specs = resolve_scenarios(cfg);
    if (specs.empty()) throw ConfigError{"no scenarios given"};

    Sink report(cfg.report, out);
    Sink traces(cfg.trace_log, out);
    Sink events(cfg.event_log, out);

    bool all_pass = true;
    std::map<std::string, int> seen;
    for (const auto& spec : specs) {
      ScenarioOptions o;
      o.profile = profile;
      o.seed = cfg.seed;
      o.bootstrap = &bootstrap;
      o.anchor_fallback = cfg.anchor_fallback;
      const int n = ++seen[spec.name];
      o.label = n == 1 ? spec.name : spec.name + "-" + std::to_string(n);

      auto run = run_spec(spec, o);
      if (!run) throw ConfigError{spec.name + ": " + run.error().message()};
      const ScenarioRun& r = *run;

      std::vector<AssertionResult> results;
      for (const auto& a : spec.assertions) results.push_back(check_assertion(a, r));
      for (const auto& a : cli_asserts) results.push_back(check_assertion(a, r));

      nlohmann::json record = to_json(r.report);
      record["record"] = "report";
      record["label"] = o.label;
      auto& aj = record["assertions"] = nlohmann::json::array();
      for (const auto& res : results) {
        aj.push_back({{"assertion", res.assertion.describe()},
                      {"pass", res.pass},
                      {"detail", res.detail}});
        all_pass = all_pass && res.pass;
      }

      if (cfg.minimality && !spec.builtin.empty()) {
        ScenarioOptions mo = o;
        if (spec.grant) mo.grant = spec.grant;
        if (!spec.variant.empty()) mo.variant = spec.variant;
        auto m = scope_minimality(*find_scenario(spec.builtin), mo);
        if (!m) throw ConfigError{spec.name + ": " + m.error().message()};
        auto& mj = record["minimality"] = nlohmann::json::array();
        for (const auto& res : *m) {
          nlohmann::json d;
          for (auto dr : res.report.denials) d.push_back(std::string(to_string(dr)));
          mj.push_back({{"dropped", std::string(scope_name(res.dropped))},
                        {"verdict", std::string(to_string(res.report.verdict))},
                        {"denials", d.is_null() ? nlohmann::json::array() : d}});
        }
      }

      if (cfg.format == "structured") {
        // Already on stdout when the report sink is "-".
        if (cfg.report != "-") out << record.dump() << "\n";
      } else {
        out << summary(r.report);
        if (record.contains("minimality")) {
          for (const auto& m : record["minimality"]) {
            out << "  without " << m["dropped"].get<std::string>() << ": "
                << m["verdict"].get<std::string>() << " " << m["denials"].dump() << "\n";
          }
        }
        for (const auto& res : results) {
          out << "  assert " << res.assertion.describe() << ": " << (res.pass ? "pass" : "FAIL")
              << " (" << res.detail << ")\n";
        }
      }
      if (report) report.line(record);
      if (traces) {
        for (const auto& t : r.sim->platform->traces()) traces.line(to_json(t));
      }
      if (events) {
        for (const auto& e : r.sim->platform->events()) {
          nlohmann::json j = to_json(e);
          j["scenario"] = o.label;
          events.line(j);
        }
      }
      report.flush();
      traces.flush();
      events.flush();
    }
    return all_pass ? kExitOk : kExitAssertion;
  } catch (const ConfigError& e) {
    err << "bcpsim run: " << e.message << "\n";
    return kExitConfig;
  }
}

int cmd_audit(const std::string& dir, const std::string& format, bool conflicts,
              std::ostream& out, std::ostream& err) {
  std::error_code ec;
  if (!std::filesystem::is_directory(dir, ec)) {
    err << "bcpsim audit: " << dir << " is not a directory\n";
    return kExitConfig;
  }
  const Corpus corpus = load_corpus(dir);
  const auto manifests = corpus.manifests();
  const AuditReport report = audit(manifests);
  if (format == "structured") {
    out << to_json(report).dump() << "\n";
    if (conflicts) out << to_json(conflict_map(manifests)).dump() << "\n";
    for (const auto& r : corpus.rejects) {
      out << nlohmann::json{{"record", "reject"}, {"file", r.file}, {"line", r.line},
                            {"message", r.message}}
                 .dump()
          << "\n";
    }
    for (const auto& w : corpus.warnings) {
      out << nlohmann::json{{"record", "warning"}, {"file", w.file}, {"line", w.line},
                            {"message", w.message}}
                 .dump()
          << "\n";
    }
    return kExitOk;
  }
  out << format_table(report);
  if (conflicts) out << format_table(conflict_map(manifests));
  for (const auto& r : corpus.rejects) {
    out << "rejected " << r.file << ":" << r.line << ": " << r.message << "\n";
  }
  for (const auto& w : corpus.warnings) {
    out << "warning " << w.file << ":" << w.line << ": " << w.message << "\n";
  }
  return kExitOk;
}

int cmd_list(const std::string& format, std::ostream& out) {
  for (const auto& s : builtin_scenarios()) {
    std::vector<std::string> platforms;
    for (auto p : s.platforms) platforms.emplace_back(to_string(p));
    if (format == "structured") {
      out << nlohmann::json{{"record", "scenario"},
                            {"name", s.name},
                            {"platforms", platforms},
                            {"variants", s.variants},
                            {"summary", s.summary}}
                 .dump()
          << "\n";
      continue;
    }
    std::string plats;
    for (const auto& p : platforms) plats += (plats.empty() ? "" : ",") + p;
    std::string line = s.name;
    line.resize(std::max<std::size_t>(line.size() + 1, 24), ' ');
    line += plats;
    line.resize(std::max<std::size_t>(line.size() + 1, 38), ' ');
    out << line << s.summary;
    if (!s.variants.empty()) {
      out << " [";
      for (std::size_t i = 0; i < s.variants.size(); ++i) out << (i ? ", " : "") << s.variants[i];
      out << "]";
    }
    out << "\n";
  }
  return kExitOk;
}

int cmd_explain(const std::string& id, const std::string& log, std::ostream& out,
                std::ostream& err) {
  std::ifstream in(log);
  if (!in) {
    err << "bcpsim explain: cannot read trace log " << log << "\n";
    return kExitConfig;
  }
  std::optional<std::uint64_t> seq;
  {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(id.data(), id.data() + id.size(), v);
    if (ec == std::errc() && p == id.data() + id.size()) seq = v;
  }
  std::vector<MediationTrace> matches;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) {
      err << "bcpsim explain: " << log << ":" << lineno << ": not valid JSON\n";
      return kExitConfig;
    }
    auto t = trace_from_json(j);
    if (!t) {
      err << "bcpsim explain: " << log << ":" << lineno << ": " << t.error().message() << "\n";
      return kExitConfig;
    }
    if (t->label == id || (seq && t->seq == *seq)) matches.push_back(*t);
  }
  if (matches.empty()) {
    err << "bcpsim explain: " << to_string(Errc::unknown_trace) << ": no trace \"" << id
        << "\" in " << log << "\n";
    return kExitConfig;
  }
  if (matches.size() > 1) {
    err << "bcpsim explain: \"" << id << "\" matches " << matches.size()
        << " traces; use the full label, e.g. " << matches.front().label << "\n";
    return kExitConfig;
  }
  out << explain(matches.front());
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deterministic simulator of collaboration-platform app permissions and attacks",
               "bcpsim"};
  app.require_subcommand(1);

  RunConfig cfg;
  if (const char* env = std::getenv("BCPSIM_SEED")) {
    std::uint64_t v = 0;
    const std::string_view s(env);
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) {
      err << "bcpsim: BCPSIM_SEED must be an unsigned integer\n";
      return kExitConfig;
    }
    cfg.seed = v;
  }

  auto* run = app.add_subcommand("run", "Run attack scenarios and check assertions");
  run->add_option("--workspace,-w", cfg.workspace, "Workspace bootstrap JSON (default: built-in)")
      ->check(CLI::ExistingFile);
  run->add_option("--scenario,-s", cfg.scenarios, "Built-in scenario name or scenario file")
      ->required();
  run->add_option("--variant", cfg.variant, "Scenario variant (see list-scenarios)");
  run->add_option("--profile,-p", cfg.profile, "Platform profile: slack or teams")
      ->capture_default_str();
  run->add_option("--cm", cfg.countermeasures,
                  "Countermeasure: C1..C6, C5-Reject|C5-Prompt|C5-Alias, or all (repeatable, "
                  "comma-separated)");
  run->add_option("--seed", cfg.seed, "Simulation seed (env BCPSIM_SEED)")->capture_default_str();
  run->add_option("--report", cfg.report, "Write report records (JSON lines) here; - for stdout");
  run->add_option("--trace-log", cfg.trace_log, "Write mediation traces (JSON lines) here");
  run->add_option("--event-log", cfg.event_log, "Write delivered events (JSON lines) here");
  run->add_option("--assert", cfg.asserts,
                  "Assertion on every scenario: verdict=Succeeded|Blocked, leaked=N, "
                  "leaked-set-equals=window, ledger-contains=Kind[,field:value]");
  run->add_option("--format", cfg.format, "Stdout format: table or structured")
      ->check(CLI::IsMember({"table", "structured"}))
      ->capture_default_str();
  run->add_flag("--anchor-fallback", cfg.anchor_fallback,
                "Extraction: anchor by posting and deleting when metadata is denied");
  run->add_flag("--minimality", cfg.minimality,
                "Also rerun each built-in once per grant scope with that scope removed");

  std::string audit_dir;
  std::string audit_format = "table";
  bool audit_conflicts = false;
  auto* aud = app.add_subcommand("audit", "Audit a directory of app manifests");
  aud->add_option("dir", audit_dir, "Directory of *.json / *.jsonl manifests")->required();
  aud->add_option("--format", audit_format, "table or structured")
      ->check(CLI::IsMember({"table", "structured"}))
      ->capture_default_str();
  aud->add_flag("--conflicts", audit_conflicts, "List shared command names and unfurl domains");

  std::string list_format = "table";
  auto* list = app.add_subcommand("list-scenarios", "List built-in attack scenarios");
  list->add_option("--format", list_format, "table or structured")
      ->check(CLI::IsMember({"table", "structured"}))
      ->capture_default_str();

  std::string trace_id;
  std::string trace_log;
  auto* exp = app.add_subcommand("explain", "Explain one recorded mediation decision");
  exp->add_option("trace", trace_id, "Trace label (scenario#seq) or sequence number")->required();
  exp->add_option("--trace-log", trace_log, "Trace log written by run --trace-log")->required();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kExitOk;
    }
    err << "bcpsim: " << e.what() << "\n";
    return kExitConfig;
  }

  if (run->parsed()) return cmd_run(cfg, out, err);
  if (aud->parsed()) return cmd_audit(audit_dir, audit_format, audit_conflicts, out, err);
  if (list->parsed()) return cmd_list(list_format, out);
  if (exp->parsed()) return cmd_explain(trace_id, trace_log, out, err);
  return kExitConfig;
}

}  // namespace bcpsim
