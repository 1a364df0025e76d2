#pragma once

#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "chorrev/order.hpp"
#include "chorrev/runtime.hpp"

namespace chorrev {

struct LoopRef {
  ControlPoint cp = 0;
  std::set<ControlPoint> body;
  Participant controller;
  auto operator<=>(const LoopRef&) const = default;
};

/// Loops of `g` in preorder.
std::vector<LoopRef> loops(const Choreography& g);

/// Membership by control point; the loop's own cp counts, so †/‡ logs belong.
bool log_in_loop(const Log& l, const LoopRef& loop);

/// Iteration index of `l` on `channel`: start-loop logs of `loop` at or
/// before `l`, minus one. nullopt when no start-loop log precedes.
std::optional<int> round_of(const Log& l, const LoopRef& loop, const ChannelState& channel);

/// Round of the log at `ref`. On channels that carry no control logs of
/// `loop` the sender's view is used: start-loop logs it consumed before
/// sending.
std::optional<int> log_round(const LogRef& ref, const LoopRef& loop, const Channels& chi);

bool ongoing(const LoopRef& loop, const Channels& chi);

/// Static data shared by all runtime causality queries on one choreography.
class CausalContext {
 public:
  /// Throws ProjectionError-like std::invalid_argument when the order is undefined.
  explicit CausalContext(const Choreography& g);

  const Choreography& choreography() const { return g_; }
  const EventOrder& order() const { return order_; }
  const std::vector<LoopRef>& loop_refs() const { return loops_; }

  /// Order node standing for a log with this cp and message.
  std::optional<std::size_t> node_of(ControlPoint cp, const Message& m) const;

  /// event_of(i) ≤G event_of(j) for the two logs.
  bool static_le(const Log& a, const Log& b) const;

  /// Innermost and outermost loops containing `l`, nullptr if none.
  const LoopRef* innermost(const Log& l) const;
  const LoopRef* outermost(const Log& l) const;
  /// Smallest loop containing both logs.
  const LoopRef* smallest_common(const Log& a, const Log& b) const;

 private:
  Choreography g_;
  EventOrder order_;
  std::vector<LoopRef> loops_;
  std::map<ControlPoint, std::size_t> send_node_;
  std::map<ControlPoint, std::pair<std::size_t, std::size_t>> loop_gates_;
};

/// Base relation and its reflexive-transitive closure over the logs of χ.
class CausalGraph {
 public:
  CausalGraph(const Channels& chi, const CausalContext& ctx);

  const std::vector<LogRef>& logs() const { return logs_; }
  std::optional<std::size_t> index_of(const LogRef& ref) const;

  bool base(std::size_t i, std::size_t j) const { return base_[i][j] != 0; }
  bool precedes(std::size_t i, std::size_t j) const { return closure_[i][j] != 0; }
  bool precedes(const LogRef& a, const LogRef& b) const;

  /// Logs ⊒ `ref`, including itself.
  std::set<LogRef> effects(const LogRef& ref) const;

  std::vector<std::pair<LogRef, LogRef>> base_edges() const;
  std::vector<std::pair<LogRef, LogRef>> closure_edges() const;
  /// Distinct pairs related both ways.
  std::vector<std::pair<LogRef, LogRef>> antisymmetry_violations() const;

 private:
  std::vector<LogRef> logs_;
  std::vector<std::vector<char>> base_;
  std::vector<std::vector<char>> closure_;
};

bool precedes(const LogRef& a, const LogRef& b, const Channels& chi, const CausalContext& ctx);

std::vector<LogRef> rollback_points(const Channels& chi, const CausalContext& ctx, const Channel& c);
bool is_rollback_point(const LogRef& ref, const Channels& chi, const CausalGraph& graph, const CausalContext& ctx);

}  // namespace chorrev
