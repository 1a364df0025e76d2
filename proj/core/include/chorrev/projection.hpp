#pragma once

#include <set>
#include <stdexcept>
#include <vector>

#include "chorrev/ast.hpp"
#include "chorrev/machine.hpp"

namespace chorrev {

struct LoopWiring {
  ControlPoint loop_cp = 0;
  Participant controller;
  std::set<Participant> body_participants;
};

/// Loops of `g` in preorder.
std::vector<LoopWiring> loop_wirings(const Choreography& g);

struct ProjectionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Local machine of `a`. Throws ProjectionError when `g` is invalid or its
/// order is undefined, MachineError on a determinization conflict.
RCfsm project(const Choreography& g, const Participant& a);

/// Projection before finalization, sharing `ids` with the caller.
PMachine project_pmachine(const Choreography& g, const Participant& a, IdSource& ids);

/// One machine per participant with pairwise disjoint state ids.
System project_system(const Choreography& g);

}  // namespace chorrev
