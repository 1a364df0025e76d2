#pragma once

#include <functional>
#include <set>
#include <string>
#include <vector>

#include "chorrev/causality.hpp"
#include "chorrev/runtime.hpp"

namespace chorrev {

struct ReversalCandidate {
  Participant participant;
  Decoration decoration;
  LogRef anchor;
  std::set<LogRef> effects;
};

/// Logs of `t` with no strictly greater log in `t`. Logs related both ways
/// count as equals, so a cycle of mutually related logs is maximal together.
std::set<LogRef> maximal_logs(const std::set<LogRef>& t, const CausalGraph& graph);

/// Picks the next log to remove among the maximal ones.
using RemovalChooser = std::function<LogRef(const std::set<LogRef>& maximal)>;

struct RollbackResult {
  Configuration config;
  /// Logs in removal order.
  std::vector<Log> removed;
  std::vector<Channel> removed_channels;
};

/// ρ: removes `t` from the configuration, maximal logs first, restoring the
/// sender of each removed log (and the receiver of a consumed one) to the
/// state recorded for it. The book is left untouched.
RollbackResult rho(const std::set<LogRef>& t, const Configuration& cfg, const CausalContext& ctx,
                   const RemovalChooser& choose = {}, const RuntimeOptions& opts = {});

std::vector<ReversalCandidate> enabled_reversals(const Configuration& cfg, const System& s,
                                                 const CausalContext& ctx, const RuntimeOptions& opts = {});

struct ReversalResult {
  Configuration config;
  std::vector<Log> removed;
  std::vector<Channel> removed_channels;
  bool exhausted = false;
};

/// Rule [REV]. Throws std::logic_error when the candidate is stale.
ReversalResult step_reverse(const Configuration& cfg, const System& s, const CausalContext& ctx,
                            const ReversalCandidate& cand, const RuntimeOptions& opts = {});

}  // namespace chorrev
