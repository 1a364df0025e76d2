#pragma once

#include <compare>
#include <functional>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace chorrev {

using Participant = std::string;
using Message = std::string;
using ControlPoint = int;

/// Reserved message labels for loop control. They never occur in choreographies.
inline const Message kStartLoop = "\xE2\x80\xA0";  // †
inline const Message kEndLoop = "\xE2\x80\xA1";    // ‡

struct Channel {
  Participant sender;
  Participant receiver;

  auto operator<=>(const Channel&) const = default;
  bool operator==(const Channel&) const = default;
};

std::string to_string(const Channel& c);  // "A->B"

enum class Polarity { Send, Receive };

struct Event {
  Channel channel;
  Polarity polarity = Polarity::Send;
  ControlPoint cp = 0;
  Message message;

  const Participant& subject() const {
    return polarity == Polarity::Send ? channel.sender : channel.receiver;
  }

  auto operator<=>(const Event&) const = default;
  bool operator==(const Event&) const = default;
};

std::string to_string(const Event& e);  // "A·B!4m"

enum class Comparator { Less, LessEq, Equal, GreaterEq, Greater };

std::string to_string(Comparator c);
bool compare(Comparator c, int lhs, int rhs);

/// Reversion guards over channel contents.
///
/// The core connectives are Count/Member atoms, Not and Or; True, False and
/// And are sugar and `desugar` rewrites them away.
struct Guard {
  enum class Kind { True, False, Count, Member, Not, Or, And };

  Kind kind = Kind::True;
  Message message;  // Count, Member
  Channel channel;  // Count, Member
  Comparator cmp = Comparator::Less;
  int bound = 0;
  std::vector<Guard> operands;  // Not: 1, Or/And: 2

  static Guard tt();
  static Guard ff();
  static Guard count(Message m, Channel c, Comparator cmp, int bound);
  static Guard member(Message m, Channel c);
  static Guard negate(Guard g);
  static Guard disj(Guard a, Guard b);
  static Guard conj(Guard a, Guard b);

  /// Channels mentioned by atoms.
  std::vector<Channel> channels() const;
};

std::strong_ordering operator<=>(const Guard& a, const Guard& b);
bool operator==(const Guard& a, const Guard& b);

std::string to_string(const Guard& g);

/// Rewrites And/True/False into the {atom, Not, Or} core.
Guard desugar(const Guard& g);

/// Abstract syntax of reversible choreographies.
struct Choreography {
  enum class Kind { Interaction, Seq, Par, Loop, Choice };

  Kind kind = Kind::Interaction;
  ControlPoint cp = 0;  // unused for Seq
  Participant sender;
  Participant receiver;
  Message message;
  Participant controller;                  // Loop
  std::optional<Participant> active_hint;  // Choice, from `choice @A`
  std::vector<Choreography> children;      // Seq: 2, Par: threads, Loop: body, Choice: branches
  std::vector<Guard> guards;               // Choice, one per branch

  static Choreography interaction(ControlPoint cp, Participant from, Participant to, Message m);
  static Choreography seq(Choreography left, Choreography right);
  static Choreography par(ControlPoint cp, std::vector<Choreography> threads);
  static Choreography loop(ControlPoint cp, Choreography body, Participant controller);
  static Choreography choice(ControlPoint cp, std::vector<Choreography> branches,
                             std::vector<Guard> guards);

  bool has_cp() const { return kind != Kind::Seq; }
  const Choreography& left() const { return children.at(0); }
  const Choreography& right() const { return children.at(1); }
  const Choreography& body() const { return children.at(0); }
};

bool operator==(const Choreography& a, const Choreography& b);

struct ParseError : std::runtime_error {
  ParseError(const std::string& what, int line, int column);
  int line;
  int column;
};

/// Parses the `.rchor` concrete syntax.
///
/// Control points are taken from `@cp N` annotations when every cp-bearing
/// node has one, otherwise assigned in preorder from 1. Mixing both styles is
/// an error. Duplicate explicit values are accepted here and reported by
/// `validate`.
Choreography parse_choreography(std::string_view text);

/// Concrete syntax; `with_cps` emits `@cp` annotations so that the output
/// parses back to the same tree.
std::string pretty_print(const Choreography& g, bool with_cps = true);

struct Violation {
  enum class Kind {
    DuplicateControlPoint,
    NonPositiveControlPoint,
    LoopControllerNotInBody,
    ChoiceArity,
    ParArity,
    SelfInteraction,
    GuardArity,
  };
  Kind kind;
  ControlPoint cp;
  std::string detail;
};

std::string to_string(Violation::Kind k);

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::size_t count(Violation::Kind k) const;
};

ValidationReport validate(const Choreography& g);

/// Control points in preorder.
std::vector<ControlPoint> control_points(const Choreography& g);

std::set<Participant> participants(const Choreography& g);

/// Choreography node tagged with `cp`, or nullptr.
const Choreography* find_node(const Choreography& g, ControlPoint cp);

struct GateMarker {
  ControlPoint cp;
  auto operator<=>(const GateMarker&) const = default;
};

/// The send event of the interaction at `cp`, or a gate marker for
/// par/loop/choice control points. Throws std::out_of_range for unknown cps.
std::variant<Event, GateMarker> event_of(ControlPoint cp, const Choreography& g);

/// Same tree with every guard replaced by tt.
Choreography strip_guards(const Choreography& g);

/// Relabels control points through `rename`, which must be injective.
Choreography rename_control_points(const Choreography& g, const std::function<ControlPoint(ControlPoint)>& rename);

}  // namespace chorrev
