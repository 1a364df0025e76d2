#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include "chorrev/ast.hpp"

namespace chorrev::test {

inline std::string fixture_path(const std::string& name) { return std::string(CHORREV_FIXTURES) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Choreography load(const std::string& name) { return parse_choreography(read_fixture(name)); }

}  // namespace chorrev::test

#include <nlohmann/json.hpp>
#include <random>

#include "chorrev/session.hpp"
#include "chorrev/trace.hpp"

namespace chorrev::test {

/// Runs a schedule fixture, stopping before the first `rev` when `stop_at_rev` is set.
inline void run_schedule(Session& s, const std::string& name, bool stop_at_rev = false) {
  auto schedule = schedule_from_json(nlohmann::json::parse(read_fixture(name)));
  std::mt19937_64 rng(0);
  for (const auto& d : schedule) {
    if (stop_at_rev && d.kind == Directive::Kind::Rev) return;
    std::string why;
    if (!s.apply(d, rng, &why)) throw std::runtime_error("schedule " + name + ": " + why);
  }
}

}  // namespace chorrev::test
