#include "bcpsim/attacks/report.hpp"

#include <sstream>

namespace bcpsim {

std::string_view to_string(Verdict v) {
  return v == Verdict::succeeded ? "Succeeded" : "Blocked";
}

std::optional<Verdict> parse_verdict(std::string_view text) {
  if (text == "Succeeded" || text == "succeeded") return Verdict::succeeded;
  if (text == "Blocked" || text == "blocked") return Verdict::blocked;
  return std::nullopt;
}

bool AttackReport::has_evidence() const {
  return !effects.empty() || !leaked.empty() || !download_refs.empty() || !artifacts.empty();
}

Status AttackReport::validate() const {
  if (verdict == Verdict::succeeded && !has_evidence()) {
    return make_error(Errc::invalid_argument, scenario + ": Succeeded without evidence");
  }
  if (verdict == Verdict::blocked && justifications.empty()) {
    return make_error(Errc::invalid_argument, scenario + ": Blocked without justification");
  }
  return ok_status();
}

nlohmann::json to_json(const AttackReport& r) {
  nlohmann::json j;
  j["scenario"] = r.scenario;
  if (!r.variant.empty()) j["variant"] = r.variant;
  j["profile"] = r.profile;
  j["seed"] = r.seed;
  j["verdict"] = std::string(to_string(r.verdict));
  j["justifications"] = r.justifications;
  auto& denials = j["denials"] = nlohmann::json::array();
  for (auto d : r.denials) denials.push_back(std::string(to_string(d)));
  auto& effects = j["effects"] = nlohmann::json::array();
  for (const auto& e : r.effects) effects.push_back(to_json(e));
  auto& leaked = j["leaked"] = nlohmann::json::array();
  for (const auto& l : r.leaked) {
    leaked.push_back({{"channel", l.channel.str()},
                      {"message", l.message.str()},
                      {"content", l.content},
                      {"truncated", l.truncated},
                      {"matches_truth", l.matches_truth}});
  }
  j["expected_leaks"] = r.expected_leaks;
  j["download_refs"] = r.download_refs;
  j["artifacts"] = r.artifacts;
  if (r.stealthy) j["stealthy"] = *r.stealthy;
  j["grant"] = {{"kind", r.grant_kind}, {"scopes", scope_names(r.grant_scopes)}};
  j["api_calls"] = r.api_calls;
  j["sim_duration_s"] = r.sim_duration;
  j["max_unfurls_per_second"] = r.max_unfurls_per_second;
  j["notes"] = r.notes;
  return j;
}

std::string summary(const AttackReport& r) {
  std::ostringstream os;
  os << r.scenario;
  if (!r.variant.empty()) os << " [" << r.variant << "]";
  os << " under " << r.profile << ": " << to_string(r.verdict) << "\n";
  os << "  grant: " << (r.grant_kind.empty() ? "-" : r.grant_kind) << " "
     << (r.grant_scopes.empty() ? "(none)" : join_scopes(r.grant_scopes)) << "\n";
  for (const auto& e : r.effects) os << "  effect: " << e.summary() << "\n";
  if (r.expected_leaks > 0 || !r.leaked.empty()) {
    std::size_t exact = 0;
    for (const auto& l : r.leaked) exact += l.matches_truth ? 1 : 0;
    os << "  leaked: " << exact << "/" << r.expected_leaks << " messages\n";
  }
  for (const auto& d : r.download_refs) os << "  download: " << d << "\n";
  for (const auto& a : r.artifacts) os << "  artifact: " << a << "\n";
  for (const auto& j : r.justifications) os << "  blocked: " << j << "\n";
  if (r.stealthy) os << "  stealthy: " << (*r.stealthy ? "yes" : "no") << "\n";
  for (const auto& n : r.notes) os << "  note: " << n << "\n";
  os << "  api calls: " << r.api_calls << ", simulated time: " << r.sim_duration << " s\n";
  return os.str();
}

}  // namespace bcpsim
