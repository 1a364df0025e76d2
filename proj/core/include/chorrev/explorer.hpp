#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "chorrev/backward.hpp"
#include "chorrev/causality.hpp"
#include "chorrev/runtime.hpp"
#include "chorrev/trace.hpp"

namespace chorrev {

/// Exploration limits: breadth-first depth, and the number of start-loop
/// messages a controller may have in flight or in history per channel.
struct Bound {
  int steps = 64;
  int rounds = 2;
};

/// Parses "steps=N,rounds=R" (either key may be omitted).
Bound parse_bound(const std::string& text);

struct ExploreOptions {
  Bound bound;
  bool reversals = false;
  RuntimeOptions runtime;
};

struct ReachSet {
  std::vector<Configuration> configs;  // breadth-first discovery order
  std::vector<int> depth;
  /// Predecessor index and the step leading here; -1 for the initial configuration.
  std::vector<int> parent;
  std::vector<TraceRecord> via;
  std::unordered_map<std::string, std::size_t> index;
  std::size_t edges = 0;
  bool truncated = false;

  std::size_t size() const { return configs.size(); }
  bool contains(const Configuration& c) const { return index.count(canonical(c)) > 0; }
  /// Steps from the initial configuration to configs[i].
  std::vector<TraceRecord> trace_to(std::size_t i) const;
};

/// True when no controller channel carries more start-loop logs than allowed.
bool within_rounds(const Configuration& cfg, const std::vector<LoopRef>& loops, int rounds);

/// Breadth-first closure under forward steps, and reversals when requested
/// (`ctx` is then required).
ReachSet reachable(const System& s, const CausalContext* ctx, const ExploreOptions& opts);

struct PlainReach {
  /// Canonical encodings of forgotten configurations.
  std::unordered_set<std::string> images;
  std::size_t states = 0;
  bool truncated = false;
};

/// Standard CFSM semantics of forget(S): bare message queues, no logs, no book.
PlainReach plain_reachable(const System& s, const std::vector<LoopRef>& loops, const Bound& bound);

struct Verdict {
  std::string property;
  bool pass = false;
  bool truncated = false;
  std::size_t decorated_states = 0;
  std::size_t plain_states = 0;
  std::size_t checked = 0;
  std::string detail;
  std::vector<TraceRecord> counterexample;
  std::optional<Configuration> witness;
};

nlohmann::json to_json(const Verdict& v, const System& s);

/// Forget images of forward-reachable configurations are plain-reachable.
Verdict check_soundness(const System& s, const CausalContext& ctx, const ExploreOptions& opts);
/// Every plain-reachable configuration has a decorated preimage.
Verdict check_completeness(const System& s, const CausalContext& ctx, const ExploreOptions& opts);
/// Every reversal from a reachable configuration lands on a
/// forget image that forward execution reaches.
Verdict check_causal_consistency(const System& s, const CausalContext& ctx, const ExploreOptions& opts);

struct AuditIssue {
  Participant participant;
  std::string detail;
};

/// Replays each participant's surviving actions from its initial state and
/// reports those whose replay does not end in its current state.
std::vector<AuditIssue> audit_configuration(const Configuration& cfg, const System& s);

}  // namespace chorrev
