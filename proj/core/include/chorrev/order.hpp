#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "chorrev/ast.hpp"

namespace chorrev {

/// A node of the event order: a communication event or a gate pseudo-event.
///
/// Loops contribute a start gate preceding their body and an end gate
/// following it; a choice contributes one gate preceding all its branches.
/// Gates behave as outputs of their subject (loop controller or active
/// participant) when sequential composition adds same-subject dependencies.
struct OrderNode {
  enum class Kind { Event, LoopStart, LoopEnd, ChoiceGate };

  Kind kind = Kind::Event;
  Event event;  // Kind::Event only
  ControlPoint cp = 0;
  Participant subject;
  /// Enclosing choice branches, outermost first: (choice cp, branch index).
  std::vector<std::pair<ControlPoint, int>> context;

  bool is_output_like() const { return kind != Kind::Event || event.polarity == Polarity::Send; }
};

std::string to_string(const OrderNode& n);

/// Reflexive-transitive relation over event and gate nodes.
class EventOrder {
 public:
  std::size_t size() const { return nodes_.size(); }
  const OrderNode& node(std::size_t i) const { return nodes_.at(i); }
  const std::vector<OrderNode>& nodes() const { return nodes_; }

  /// i ≤ j.
  bool precedes(std::size_t i, std::size_t j) const { return rel_[i][j] != 0; }

  std::optional<std::size_t> find_event(const Event& e) const;
  std::optional<std::size_t> find_gate(OrderNode::Kind kind, ControlPoint cp) const;

  /// Indices with no strict predecessor.
  std::vector<std::size_t> minimal() const;

  bool is_partial_order() const;

  /// Pairs (i, j), i ≠ j, with i ≤ j.
  std::vector<std::pair<std::size_t, std::size_t>> strict_pairs() const;

  std::size_t add_node(OrderNode n);
  void enclose_in_branch(std::size_t i, ControlPoint choice, int branch);
  void add_edge(std::size_t from, std::size_t to) { rel_[from][to] = 1; }
  /// Appends all nodes and edges of `other`; returns the index offset.
  std::size_t absorb(const EventOrder& other);
  void close();

  friend bool operator==(const EventOrder& a, const EventOrder& b);

 private:
  std::vector<OrderNode> nodes_;
  std::vector<std::vector<char>> rel_;
};

struct Undefined {
  std::string construct;
  std::string reason;
  /// Optional pair of rendered nodes that fail to be ordered.
  std::optional<std::pair<std::string, std::string>> witness;
};

template <class T>
using Defined = std::variant<T, Undefined>;

template <class T>
bool is_defined(const Defined<T>& d) {
  return std::holds_alternative<T>(d);
}

/// Partial-order semantics of a validated choreography.
Defined<EventOrder> semantics(const Choreography& g);

/// Sequential composition of two orders. Defined when, for every resolution
/// of the choices involved, each interaction on the right has an event that
/// is causally after some node on the left.
Defined<EventOrder> seq_compose(const EventOrder& left, const EventOrder& right, const Choreography& g);

Defined<Participant> active_participant(const Choreography& choice);

struct CheckReport {
  bool ok = true;
  std::vector<std::string> problems;
};

CheckReport well_branched(const Choreography& choice);

/// True iff every atom of `guard` is on a channel with `active` as an endpoint.
bool guard_local(const Guard& guard, const Participant& active);

}  // namespace chorrev
