#include "bcpsim/attacks/scenario_file.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "bcpsim/core/manifest_json.hpp"
#include "bcpsim/victims/apps.hpp"
#include "builtin.hpp"

namespace bcpsim {

namespace {

Error bad(const std::string& what) { return make_error(Errc::invalid_argument, what); }

std::string json_text(const nlohmann::json& v) {
  return v.is_string() ? v.get<std::string>() : v.dump();
}

}  // namespace

// ---------------------------------------------------------------- assertions

std::string Assertion::describe() const {
  switch (kind) {
    case Kind::verdict:
      return "verdict=" + std::string(to_string(verdict));
    case Kind::ledger_contains: {
      std::string s = "ledger-contains=" + std::string(display_name(effect));
      for (const auto& [k, v] : fields) s += "," + k + ":" + v;
      return s;
    }
    case Kind::leaked_set_equals:
      return window ? "leaked-set-equals=window"
                    : "leaked-set-equals=[" + std::to_string(texts.size()) + " texts]";
    case Kind::leaked_count:
      return "leaked=" + std::to_string(count);
  }
  return {};
}

Result<Assertion> parse_assertion(std::string_view text) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos) return bad("assertion \"" + std::string(text) + "\" needs key=value");
  const std::string key(text.substr(0, eq));
  const std::string value(text.substr(eq + 1));
  Assertion a;
  if (key == "verdict") {
    auto v = parse_verdict(value);
    if (!v) return bad("unknown verdict \"" + value + "\"");
    a.kind = Assertion::Kind::verdict;
    a.verdict = *v;
    return a;
  }
  if (key == "ledger-contains" || key == "ledger_contains") {
    // EmailSent[,field:value...]
    std::vector<std::string> parts;
    std::stringstream ss(value);
    for (std::string part; std::getline(ss, part, ',');) parts.push_back(part);
    if (parts.empty()) return bad("ledger-contains needs an effect kind");
    auto k = parse_effect_kind(parts[0]);
    if (!k) return bad("unknown effect kind \"" + parts[0] + "\"");
    a.kind = Assertion::Kind::ledger_contains;
    a.effect = *k;
    for (std::size_t i = 1; i < parts.size(); ++i) {
      const auto colon = parts[i].find(':');
      if (colon == std::string::npos) return bad("ledger-contains field needs name:value");
      a.fields[parts[i].substr(0, colon)] = parts[i].substr(colon + 1);
    }
    return a;
  }
  if (key == "leaked-set-equals" || key == "leaked_set_equals") {
    if (value != "window") return bad("leaked-set-equals on the command line takes \"window\"");
    a.kind = Assertion::Kind::leaked_set_equals;
    a.window = true;
    return a;
  }
  if (key == "leaked") {
    std::size_t n = 0;
    auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), n);
    if (ec != std::errc() || p != value.data() + value.size()) return bad("leaked needs a count");
    a.kind = Assertion::Kind::leaked_count;
    a.count = n;
    return a;
  }
  return bad("unknown assertion \"" + key + "\"");
}

Result<Assertion> assertion_from_json(const nlohmann::json& j) {
  if (j.is_string()) return parse_assertion(j.get<std::string>());
  if (!j.is_object() || j.size() != 1) return bad("assertion must be a string or a one-key object");
  const auto& [key, value] = *j.items().begin();
  Assertion a;
  if (key == "verdict") {
    if (!value.is_string()) return bad("verdict must be a string");
    return parse_assertion("verdict=" + value.get<std::string>());
  }
  if (key == "ledger_contains" || key == "ledger-contains") {
    if (!value.is_object() || !value.contains("kind") || !value["kind"].is_string()) {
      return bad("ledger_contains needs {\"kind\": ...}");
    }
    auto k = parse_effect_kind(value["kind"].get<std::string>());
    if (!k) return bad("unknown effect kind " + value["kind"].dump());
    a.kind = Assertion::Kind::ledger_contains;
    a.effect = *k;
    for (const auto& [f, v] : value.items()) {
      if (f != "kind") a.fields[f] = json_text(v);
    }
    return a;
  }
  if (key == "leaked_set_equals" || key == "leaked-set-equals") {
    a.kind = Assertion::Kind::leaked_set_equals;
    if (value.is_string() && value.get<std::string>() == "window") {
      a.window = true;
      return a;
    }
    if (!value.is_array()) return bad("leaked_set_equals takes \"window\" or a list of texts");
    for (const auto& t : value) {
      if (!t.is_string()) return bad("leaked_set_equals texts must be strings");
      a.texts.push_back(t.get<std::string>());
    }
    return a;
  }
  if (key == "leaked") {
    if (!value.is_number_unsigned()) return bad("leaked needs a count");
    a.kind = Assertion::Kind::leaked_count;
    a.count = value.get<std::size_t>();
    return a;
  }
  return bad("unknown assertion \"" + key + "\"");
}

namespace {

bool effect_matches(const Effect& e, const Assertion& a) {
  if (e.kind() != a.effect) return false;
  const auto j = to_json(e);
  const auto& fields = j["fields"];
  for (const auto& [k, v] : a.fields) {
    if (!fields.contains(k) || json_text(fields[k]) != v) return false;
  }
  return true;
}

}  // namespace

AssertionResult check_assertion(const Assertion& a, const ScenarioRun& run) {
  AssertionResult out{a, false, {}};
  const AttackReport& r = run.report;
  switch (a.kind) {
    case Assertion::Kind::verdict:
      out.pass = r.verdict == a.verdict;
      out.detail = "verdict " + std::string(to_string(r.verdict));
      break;
    case Assertion::Kind::ledger_contains: {
      std::size_t n = 0;
      for (const auto& e : run.sim->ledger.entries()) n += effect_matches(e, a) ? 1 : 0;
      out.pass = n > 0;
      out.detail = std::to_string(n) + " matching ledger entries";
      break;
    }
    case Assertion::Kind::leaked_set_equals: {
      std::size_t exact = 0;
      for (const auto& l : r.leaked) exact += l.matches_truth ? 1 : 0;
      if (a.window) {
        out.pass = r.expected_leaks > 0 && exact == r.expected_leaks && r.leaked.size() == exact;
        out.detail = std::to_string(exact) + "/" + std::to_string(r.expected_leaks) + " leaked";
      } else {
        std::multiset<std::string> want(a.texts.begin(), a.texts.end());
        std::multiset<std::string> got;
        for (const auto& l : r.leaked) got.insert(l.content);
        out.pass = want == got;
        out.detail = std::to_string(got.size()) + " leaked, " + std::to_string(want.size()) +
                     " expected";
      }
      break;
    }
    case Assertion::Kind::leaked_count: {
      std::size_t exact = 0;
      for (const auto& l : r.leaked) exact += l.matches_truth ? 1 : 0;
      out.pass = exact == a.count;
      out.detail = std::to_string(exact) + " leaked";
      break;
    }
  }
  return out;
}

// ---------------------------------------------------------------- spec files

Result<ScenarioSpec> spec_from_json(const nlohmann::json& j, const std::string& source) {
  if (!j.is_object()) return bad(source + ": scenario must be an object");
  ScenarioSpec s;
  s.source = source;
  auto str = [&](const char* key, std::string& out) -> Status {
    if (!j.contains(key)) return ok_status();
    if (!j[key].is_string()) return bad(source + ": \"" + std::string(key) + "\" must be a string");
    out = j[key].get<std::string>();
    return ok_status();
  };
  for (auto [key, out] : {std::pair{"name", &s.name}, std::pair{"builtin", &s.builtin},
                          std::pair{"variant", &s.variant}}) {
    if (auto st = str(key, *out); !st) return st.error();
  }
  if (s.name.empty()) s.name = s.builtin.empty() ? "scripted" : s.builtin;
  if (!s.builtin.empty() && !find_scenario(s.builtin)) {
    return bad(source + ": unknown built-in scenario \"" + s.builtin + "\"");
  }

  if (j.contains("options")) {
    const auto& o = j["options"];
    if (!o.is_object()) return bad(source + ": \"options\" must be an object");
    for (const auto& [k, v] : o.items()) {
      if (k == "victim" || k == "target_channel" || k == "attacker_user") {
        if (!v.is_string()) return bad(source + ": option " + k + " must be a string");
        auto& dst = k == "victim" ? s.victim : k == "target_channel" ? s.target_channel
                                                                     : s.attacker_user;
        dst = v.get<std::string>();
      } else if (k == "anchor_fallback") {
        if (!v.is_boolean()) return bad(source + ": anchor_fallback must be a boolean");
        s.anchor_fallback = v.get<bool>();
      } else if (k == "grant") {
        if (!v.is_array()) return bad(source + ": grant must be a list of scopes");
        ScopeSet g;
        for (const auto& n : v) {
          auto sc = n.is_string() ? parse_scope(n.get<std::string>()) : std::nullopt;
          if (!sc) return bad(source + ": unknown scope " + n.dump());
          g.insert(*sc);
        }
        s.grant = g;
      } else {
        return bad(source + ": unknown option \"" + k + "\"");
      }
    }
  }
  if (j.contains("platforms")) {
    if (!j["platforms"].is_array()) return bad(source + ": \"platforms\" must be a list");
    for (const auto& p : j["platforms"]) {
      auto pk = p.is_string() ? parse_platform(p.get<std::string>()) : std::nullopt;
      if (!pk) return bad(source + ": unknown platform " + p.dump());
      s.platforms.insert(*pk);
    }
  }
  if (j.contains("steps")) {
    if (!s.builtin.empty()) return bad(source + ": a scenario has either \"builtin\" or \"steps\"");
    if (!j["steps"].is_array()) return bad(source + ": \"steps\" must be a list");
    for (std::size_t i = 0; i < j["steps"].size(); ++i) {
      const auto& st = j["steps"][i];
      const std::string where = source + ": step " + std::to_string(i + 1);
      if (!st.is_object() || !st.contains("action") || !st["action"].is_string()) {
        return bad(where + " needs an \"action\"");
      }
      ScenarioStep step;
      step.action = st["action"].get<std::string>();
      if (st.contains("at")) {
        if (!st["at"].is_number_unsigned()) return bad(where + ": \"at\" must be a whole number");
        step.at = st["at"].get<SimTime>();
      }
      if (st.contains("actor")) {
        if (!st["actor"].is_string()) return bad(where + ": \"actor\" must be a string");
        step.actor = st["actor"].get<std::string>();
      }
      if (st.contains("args")) {
        if (!st["args"].is_object()) return bad(where + ": \"args\" must be an object");
        step.args = st["args"];
      }
      s.steps.push_back(std::move(step));
    }
  }
  if (s.builtin.empty() && s.steps.empty()) {
    return bad(source + ": scenario needs \"builtin\" or \"steps\"");
  }
  if (j.contains("expect")) {
    auto a = assertion_from_json(nlohmann::json{{"ledger_contains", j["expect"]}});
    if (!a) return bad(source + ": expect: " + a.error().detail);
    s.expect = *a;
  } else if (s.builtin.empty()) {
    return bad(source + ": a step script needs \"expect\"");
  }
  if (j.contains("assert")) {
    const auto& list = j["assert"];
    if (!list.is_array()) return bad(source + ": \"assert\" must be a list");
    for (const auto& aj : list) {
      auto a = assertion_from_json(aj);
      if (!a) return bad(source + ": " + a.error().detail);
      s.assertions.push_back(*a);
    }
  }
  return s;
}

Result<std::vector<ScenarioSpec>> load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) return bad("cannot read scenario file " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) return bad(path.string() + ": not valid JSON");
  std::vector<ScenarioSpec> out;
  if (j.is_array()) {
    for (std::size_t i = 0; i < j.size(); ++i) {
      auto s = spec_from_json(j[i], path.string() + "[" + std::to_string(i) + "]");
      if (!s) return s.error();
      out.push_back(std::move(s).value());
    }
  } else {
    auto s = spec_from_json(j, path.string());
    if (!s) return s.error();
    out.push_back(std::move(s).value());
  }
  return out;
}

// ---------------------------------------------------------------- step runner

namespace {

using namespace scenario_detail;

class StepRunner {
 public:
  StepRunner(ScenarioRun& run, const ScenarioSpec& spec) : run_(run), spec_(spec) {}

  Status execute(const ScenarioStep& step, std::size_t index);

  std::set<AppId> scripted;

 private:
  Platform& p() { return *run_.sim->platform; }
  Error config(std::size_t index, const std::string& what) const {
    return bad(spec_.source + ": step " + std::to_string(index + 1) + ": " + what);
  }
  void failed(const Error& e, const std::string& what) {
    block_on(run_.report, e, what);
  }
  std::string arg(const ScenarioStep& s, const char* key) const {
    return s.args.contains(key) && s.args[key].is_string() ? s.args[key].get<std::string>() : "";
  }
  Result<AppId> app_of(const std::string& name, std::size_t index) {
    auto it = apps_.find(name);
    if (it != apps_.end()) return it->second;
    if (const InstalledApp* a = p().registry().app_by_name(name)) return a->id;
    return config(index, "no app named \"" + name + "\"");
  }
  Result<GrantId> token_for(const ScenarioStep& s, const AppId& app, std::size_t index) {
    const std::string as = arg(s, "as");
    if (as.empty()) {
      auto g = p().bot_grant(app);
      if (!g) return config(index, "app has no bot token");
      return *g;
    }
    const User* u = p().workspace().user_by_name(as);
    if (!u) return config(index, "no user named \"" + as + "\"");
    auto it = delegated_.find({app, u->id});
    if (it == delegated_.end()) return config(index, as + " has not authorized this app");
    return it->second;
  }
  Result<PostTarget> target_of(const ScenarioStep& s, std::size_t index) {
    if (auto c = arg(s, "channel"); !c.empty()) return PostTarget{ChannelName{c}};
    if (auto u = arg(s, "user"); !u.empty()) {
      const User* user = p().workspace().user_by_name(u);
      if (!user) return config(index, "no user named \"" + u + "\"");
      return PostTarget{user->id};
    }
    if (auto a = arg(s, "app"); !a.empty()) {
      auto id = app_of(a, index);
      if (!id) return id.error();
      return PostTarget{*id};
    }
    return config(index, "needs a channel, user, or app target");
  }

  ScenarioRun& run_;
  const ScenarioSpec& spec_;
  std::map<std::string, AppId> apps_;
  std::map<std::pair<AppId, UserId>, GrantId> delegated_;
  std::map<std::string, PostedMessage> last_post_;
  // Installs and authorizations the platform refused; later steps that need
  // them are skipped rather than treated as script errors.
  std::set<std::string> refused_apps_;
  std::set<std::pair<std::string, std::string>> refused_auth_;
  std::set<std::string> refused_posts_;
};

Status StepRunner::execute(const ScenarioStep& s, std::size_t index) {
  const User* user = p().workspace().user_by_name(s.actor);
  const std::string& act = s.action;

  if (act == "wait") return ok_status();
  const std::string app_arg = arg(s, "app");
  const bool needs_refused =
      refused_apps_.contains(s.actor) || (!app_arg.empty() && refused_apps_.contains(app_arg)) ||
      refused_auth_.contains({s.actor, arg(s, "as")});
  if (needs_refused) {
    run_.report.notes.push_back("step " + std::to_string(index + 1) + " (" + act +
                                ") skipped: an earlier step was refused");
    return ok_status();
  }

  if (act == "install") {
    if (!user) return config(index, "install needs a user actor");
    if (!s.args.contains("manifest")) return config(index, "install needs a manifest");
    nlohmann::json mj = s.args["manifest"];
    if (mj.is_object() && !mj.contains("platform")) {
      mj["platform"] = std::string(to_string(p().profile().platform));
    }
    auto m = manifest_from_json(mj);
    if (!m) return config(index, m.error().detail);
    auto id = p().install_app(*m, user->id);
    if (!id) {
      failed(id.error(), "install " + m->name);
      refused_apps_.insert(m->name);
      return ok_status();
    }
    apps_[m->name] = *id;
    scripted.insert(*id);
    if (s.args.contains("channels")) {
      for (const auto& c : s.args["channels"]) {
        const Channel* ch = c.is_string() ? p().workspace().channel_by_name(c.get<std::string>())
                                          : nullptr;
        if (!ch) return config(index, "unknown channel " + c.dump());
        p().workspace().add_bot(ch->id, *id);
      }
    }
    if (auto kind = arg(s, "behavior"); !kind.empty()) {
      const std::string cfg = s.args.contains("config") ? s.args["config"].dump() : "{}";
      auto b = make_behavior(kind, cfg, run_.sim->ledger,
                             p().profile().has(Countermeasure::issuer_identity));
      if (!b) return config(index, "unknown behavior \"" + kind + "\"");
      p().set_behavior(*id, std::move(b));
    }
    return ok_status();
  }

  if (act == "authorize") {
    if (!user) return config(index, "authorize needs a user actor");
    auto app = app_of(arg(s, "app"), index);
    if (!app) return app.error();
    std::optional<ScopeSet> scopes;
    if (s.args.contains("scopes")) {
      ScopeSet set;
      for (const auto& n : s.args["scopes"]) {
        auto sc = n.is_string() ? parse_scope(n.get<std::string>()) : std::nullopt;
        if (!sc) return config(index, "unknown scope " + n.dump());
        set.insert(*sc);
      }
      scopes = set;
    }
    const bool decline = s.args.value("decline", false);
    auto g = p().authorize_user_delegation(*app, user->id, scopes, decline);
    if (!g) {
      failed(g.error(), "authorize " + arg(s, "app"));
      refused_auth_.insert({arg(s, "app"), s.actor});
      return ok_status();
    }
    delegated_[{*app, user->id}] = *g;
    return ok_status();
  }

  if (act == "invoke") {
    if (!user) return config(index, "invoke needs a user actor");
    const Channel* ch = p().workspace().channel_by_name(arg(s, "channel"));
    if (!ch) return config(index, "invoke needs a known channel");
    if (s.args.contains("confirm")) {
      p().script_confirmation(user->id, arg(s, "command"), s.args.value("confirm", false));
    }
    auto r = p().invoke_command(user->id, arg(s, "command"), ch->id, arg(s, "text"));
    if (!r) failed(r.error(), "invoke " + arg(s, "command"));
    return ok_status();
  }

  if (user) {
    // Client-path actions.
    if (act == "post") {
      auto t = target_of(s, index);
      if (!t) return t.error();
      auto pm = p().user_post(user->id, *t, arg(s, "text"));
      if (!pm) return config(index, pm.error().message());
      last_post_[s.actor] = *pm;
      return ok_status();
    }
    if (act == "upload") {
      const Channel* ch = p().workspace().channel_by_name(arg(s, "channel"));
      if (!ch) return config(index, "upload needs a known channel");
      auto f = p().user_upload(user->id, ch->id, arg(s, "name"), arg(s, "content"));
      if (!f) return config(index, f.error().message());
      return ok_status();
    }
    return config(index, "users cannot \"" + act + "\"");
  }

  auto app = app_of(s.actor, index);
  if (!app) return app.error();
  if (act == "uninstall") {
    auto r = p().uninstall_app(*app);
    if (!r) return config(index, r.error().message());
    run_.report.notes.push_back(s.actor + " uninstalled; residual " +
                                std::to_string(r->residual_count()));
    return ok_status();
  }
  if (act == "rename_command") {
    auto r = p().rename_command(*app, arg(s, "from"), arg(s, "to"));
    if (!r) failed(r.error(), "rename " + arg(s, "from"));
    return ok_status();
  }
  if (act == "register_domain") {
    auto r = p().register_unfurl_domain(*app, arg(s, "domain"));
    if (!r) failed(r.error(), "register " + arg(s, "domain"));
    return ok_status();
  }

  auto token = token_for(s, *app, index);
  if (!token) return token.error();
  const std::string key = s.actor + "/" + arg(s, "as");
  if ((act == "delete_last" || act == "save" || act == "unsave") && !last_post_.contains(key) &&
      refused_posts_.contains(key)) {
    run_.report.notes.push_back("step " + std::to_string(index + 1) + " (" + act +
                                ") skipped: the post it targets was refused");
    return ok_status();
  }
  if (act == "post") {
    auto t = target_of(s, index);
    if (!t) return t.error();
    auto pm = p().post_message(*token, *t, arg(s, "text"));
    if (!pm) {
      failed(pm.error(), "post");
      refused_posts_.insert(key);
    } else {
      last_post_[key] = *pm;
    }
    return ok_status();
  }
  if (act == "delete_last") {
    auto it = last_post_.find(key);
    if (it == last_post_.end()) return config(index, "nothing posted yet to delete");
    if (auto st = p().delete_message(*token, it->second.channel, it->second.id); !st) {
      failed(st.error(), "delete");
    }
    return ok_status();
  }
  if (act == "schedule") {
    auto t = target_of(s, index);
    if (!t) return t.error();
    const SimTime after = s.args.value("after", SimTime{60});
    auto r = p().schedule_message(*token, *t, arg(s, "text"), p().now() + after);
    if (!r) failed(r.error(), "schedule");
    return ok_status();
  }
  if (act == "upload") {
    auto t = target_of(s, index);
    if (!t) return t.error();
    auto f = p().upload_file(*token, *t, arg(s, "name"), arg(s, "content"));
    if (!f) failed(f.error(), "upload");
    return ok_status();
  }
  if (act == "save" || act == "unsave") {
    const std::string kind_name = s.args.value("kind", std::string("pin"));
    const SavedKind kind = kind_name == "star"       ? SavedKind::star
                           : kind_name == "reaction" ? SavedKind::reaction
                                                     : SavedKind::pin;
    auto it = last_post_.find(key);
    if (it == last_post_.end()) return config(index, "save targets the actor's last post");
    const std::string emoji = arg(s, "emoji");
    Status st = act == "save" ? p().add_saved(*token, kind, it->second.channel, it->second.id, emoji)
                              : p().remove_saved(*token, kind, it->second.channel, it->second.id,
                                                 emoji);
    if (!st) failed(st.error(), act);
    return ok_status();
  }
  return config(index, "unknown action \"" + act + "\"");
}

}  // namespace

Result<ScenarioRun> run_spec(const ScenarioSpec& spec, const ScenarioOptions& base) {
  ScenarioOptions o = base;
  if (spec.victim) o.victim = *spec.victim;
  if (spec.target_channel) o.target_channel = *spec.target_channel;
  if (spec.attacker_user) o.attacker_user = *spec.attacker_user;
  if (spec.anchor_fallback) o.anchor_fallback = *spec.anchor_fallback;
  if (spec.grant) o.grant = spec.grant;
  if (!spec.variant.empty()) o.variant = spec.variant;
  if (!spec.platforms.empty() && !spec.platforms.contains(o.profile.platform)) {
    return make_error(Errc::unsupported, spec.name + " does not apply to " +
                                             std::string(to_string(o.profile.platform)));
  }
  if (o.label.empty()) o.label = spec.name;

  if (!spec.builtin.empty()) {
    auto run = run_scenario(*find_scenario(spec.builtin), o);
    if (run) run.value().report.scenario = spec.name;
    return run;
  }

  auto made = make_sim(o);
  if (!made) return made.error();
  ScenarioRun run = start_run(o, spec.name, std::move(made).value());
  Platform& p = *run.sim->platform;
  const SimTime start = p.now();
  StepRunner runner(run, spec);
  for (std::size_t i = 0; i < spec.steps.size(); ++i) {
    const ScenarioStep& step = spec.steps[i];
    if (start + step.at < p.now()) {
      return bad(spec.source + ": step " + std::to_string(i + 1) + " is earlier than step " +
                 std::to_string(i));
    }
    p.tick(start + step.at);
    if (auto st = runner.execute(step, i); !st) return st.error();
  }
  p.tick(p.now() + 2);

  AttackReport& r = run.report;
  for (const auto& e : run.sim->ledger.entries()) {
    if (!effect_matches(e, *spec.expect)) continue;
    const bool ours = std::any_of(runner.scripted.begin(), runner.scripted.end(),
                                  [&](const AppId& a) { return e.app == a || caused_by_app(p, e, a); });
    if (ours) r.effects.push_back(e);
  }
  std::size_t api_calls = 0;
  std::set<DenialReason> denials;
  for (const auto& a : runner.scripted) {
    api_calls += p.api_calls(a);
    for (auto d : denials_of(p, a)) denials.insert(d);
  }
  if (!r.effects.empty()) {
    r.verdict = Verdict::succeeded;
    r.justifications.clear();
  } else {
    r.verdict = Verdict::blocked;
    for (auto d : denials) {
      r.denials.insert(d);
      r.justifications.push_back(std::string(to_string(d)) + ": denied during the script");
    }
    r.justifications.push_back("expected effect absent: " + spec.expect->describe());
  }
  r.profile = p.profile().describe();
  r.api_calls = api_calls;
  r.sim_duration = p.now() - start;
  r.max_unfurls_per_second = max_unfurls_per_second(p);
  if (auto v = r.validate(); !v) return v.error();
  return run;
}

}  // namespace bcpsim
