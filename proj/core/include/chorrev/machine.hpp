#pragma once

#include <compare>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "chorrev/ast.hpp"

namespace chorrev {

/// Opaque machine state identifier. Human-readable names live in RCfsm::aliases.
struct StateId {
  int value = -1;
  auto operator<=>(const StateId&) const = default;
};

class IdSource {
 public:
  StateId fresh() { return StateId{next_++}; }

 private:
  int next_ = 0;
};

/// Branch decoration of a transition: none, inside a branch (ongoing), or
/// leaving a branch (committed).
struct Decoration {
  enum class Kind { Unit, Ongoing, Committed };

  Kind kind = Kind::Unit;
  StateId choice_state;
  Event first_output;
  Guard guard;

  static Decoration unit() { return {}; }
  static Decoration ongoing(StateId q, Event e, Guard g) { return {Kind::Ongoing, q, std::move(e), std::move(g)}; }
  static Decoration committed(StateId q, Event e, Guard g) {
    return {Kind::Committed, q, std::move(e), std::move(g)};
  }

  bool is_unit() const { return kind == Kind::Unit; }

  auto operator<=>(const Decoration&) const = default;
  bool operator==(const Decoration&) const = default;
};

struct Transition {
  StateId from;
  Event event;
  Decoration decoration;
  StateId to;

  auto operator<=>(const Transition&) const = default;
  bool operator==(const Transition&) const = default;
};

struct MachineError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Projection intermediate: an r-CFSM with an interface state used for gluing.
struct PMachine {
  Participant owner;
  std::set<StateId> states;
  StateId initial;
  StateId interface;
  std::vector<Transition> transitions;

  /// Single state that is both initial and interface.
  static PMachine empty(Participant owner, IdSource& ids);
  /// Two states joined by one undecorated transition.
  static PMachine single(Participant owner, Event e, IdSource& ids);

  bool is_empty() const { return initial == interface && transitions.empty(); }
};

/// Reversible communicating finite-state machine.
class RCfsm {
 public:
  RCfsm() = default;
  RCfsm(Participant owner, std::set<StateId> states, StateId initial, std::vector<Transition> transitions,
        std::map<StateId, std::string> aliases = {});

  const Participant& owner() const { return owner_; }
  const std::set<StateId>& states() const { return states_; }
  StateId initial() const { return initial_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  /// Transitions leaving `q`, in sorted order.
  std::span<const Transition> outgoing(StateId q) const;

  /// Alias of `q`, or "#<id>" when it has none.
  std::string alias(StateId q) const;
  const std::map<StateId, std::string>& aliases() const { return aliases_; }

  bool deterministic() const;

  /// Same machine with every state id shifted by `offset`.
  RCfsm shifted(int offset) const;

  friend bool operator==(const RCfsm& a, const RCfsm& b) {
    return a.owner_ == b.owner_ && a.states_ == b.states_ && a.initial_ == b.initial_ &&
           a.transitions_ == b.transitions_;
  }

 private:
  Participant owner_;
  std::set<StateId> states_;
  StateId initial_;
  std::vector<Transition> transitions_;  // sorted
  std::map<StateId, std::string> aliases_;
};

using System = std::map<Participant, RCfsm>;

/// State substitution θ applied to states, transitions and decoration references.
using Substitution = std::map<StateId, StateId>;

StateId apply(const Substitution& theta, StateId q);
Decoration apply(const Substitution& theta, const Decoration& d);
PMachine apply(const Substitution& theta, const PMachine& m);

/// Marks transitions into the interface as committed and all others as
/// ongoing, with decoration (choice_state, first_output, guard).
PMachine decorate(const PMachine& m, StateId choice_state, const Event& first_output, const Guard& guard);

/// m1's interface becomes m2's initial state.
PMachine seq(const PMachine& m1, const PMachine& m2);

/// m1's initial and interface are merged onto m2's.
PMachine join(const PMachine& m1, const PMachine& m2);

/// Asynchronous interleaving product. Every pair of states gets a fresh id.
PMachine product(const PMachine& m1, const PMachine& m2, IdSource& ids);

/// Removes the interface, determinizes and minimizes over (event, decoration)
/// labels. States are renumbered 0..n-1 breadth-first and aliased q0, q1, ...
RCfsm finalize(const PMachine& m);

/// Drops every decoration.
RCfsm forget_machine(const RCfsm& m);

/// Graphviz rendering of one machine.
std::string to_dot(const RCfsm& m);

std::string to_string(const Decoration& d, const RCfsm* names = nullptr);

/// Machine text dump, one transition per line.
std::string describe(const RCfsm& m);

}  // namespace chorrev
