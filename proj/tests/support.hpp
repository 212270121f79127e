#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>

#include "bcpsim/attacks/scenario.hpp"
#include "bcpsim/permission/profile.hpp"

namespace bcpsim::test {

inline std::filesystem::path source_dir() { return BCPSIM_SOURCE_DIR; }
inline std::filesystem::path fixture(const std::string& rel) {
  return source_dir() / "tests" / "fixtures" / rel;
}

inline PolicyProfile profile_of(PlatformKind p, std::initializer_list<const char*> flags = {}) {
  PolicyProfile prof = PolicyProfile::baseline(p);
  for (const char* f : flags) {
    if (auto st = apply_countermeasure_flag(prof, f); !st) {
      throw std::runtime_error(st.error().message());
    }
  }
  return prof;
}

inline ScenarioRun run(const std::string& name, const PolicyProfile& profile,
                       const std::string& variant = {}, std::uint64_t seed = 1) {
  const ScenarioInfo* info = find_scenario(name);
  if (!info) throw std::runtime_error("no scenario " + name);
  ScenarioOptions o;
  o.profile = profile;
  o.variant = variant;
  o.seed = seed;
  auto r = run_scenario(*info, o);
  if (!r) throw std::runtime_error(name + ": " + r.error().message());
  return std::move(r).value();
}

}  // namespace bcpsim::test
