#include "chorrev/ast.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace chorrev {

std::string to_string(const Channel& c) { return c.sender + "->" + c.receiver; }

std::string to_string(const Event& e) {
  std::ostringstream os;
  os << e.channel.sender << "\xC2\xB7" << e.channel.receiver
     << (e.polarity == Polarity::Send ? "!" : "?") << e.cp << e.message;
  return os.str();
}

std::string to_string(Comparator c) {
  switch (c) {
    case Comparator::Less: return "<";
    case Comparator::LessEq: return "<=";
    case Comparator::Equal: return "==";
    case Comparator::GreaterEq: return ">=";
    case Comparator::Greater: return ">";
  }
  return "?";
}

bool compare(Comparator c, int lhs, int rhs) {
  switch (c) {
    case Comparator::Less: return lhs < rhs;
    case Comparator::LessEq: return lhs <= rhs;
    case Comparator::Equal: return lhs == rhs;
    case Comparator::GreaterEq: return lhs >= rhs;
    case Comparator::Greater: return lhs > rhs;
  }
  return false;
}

// ---------------------------------------------------------------------------
// Guards

Guard Guard::tt() { return Guard{}; }

Guard Guard::ff() {
  Guard g;
  g.kind = Kind::False;
  return g;
}

Guard Guard::count(Message m, Channel c, Comparator cmp, int bound) {
  Guard g;
  g.kind = Kind::Count;
  g.message = std::move(m);
  g.channel = std::move(c);
  g.cmp = cmp;
  g.bound = bound;
  return g;
}

Guard Guard::member(Message m, Channel c) {
  Guard g;
  g.kind = Kind::Member;
  g.message = std::move(m);
  g.channel = std::move(c);
  return g;
}

Guard Guard::negate(Guard inner) {
  Guard g;
  g.kind = Kind::Not;
  g.operands.push_back(std::move(inner));
  return g;
}

Guard Guard::disj(Guard a, Guard b) {
  Guard g;
  g.kind = Kind::Or;
  g.operands.push_back(std::move(a));
  g.operands.push_back(std::move(b));
  return g;
}

Guard Guard::conj(Guard a, Guard b) {
  Guard g;
  g.kind = Kind::And;
  g.operands.push_back(std::move(a));
  g.operands.push_back(std::move(b));
  return g;
}

std::vector<Channel> Guard::channels() const {
  std::vector<Channel> out;
  if (kind == Kind::Count || kind == Kind::Member) out.push_back(channel);
  for (const auto& o : operands) {
    auto sub = o.channels();
    out.insert(out.end(), sub.begin(), sub.end());
  }
  return out;
}

std::strong_ordering operator<=>(const Guard& a, const Guard& b) {
  if (auto c = a.kind <=> b.kind; c != 0) return c;
  switch (a.kind) {
    case Guard::Kind::Count:
      if (auto c = a.cmp <=> b.cmp; c != 0) return c;
      if (auto c = a.bound <=> b.bound; c != 0) return c;
      [[fallthrough]];
    case Guard::Kind::Member:
      if (auto c = a.message <=> b.message; c != 0) return c;
      return a.channel <=> b.channel;
    default:
      break;
  }
  if (auto c = a.operands.size() <=> b.operands.size(); c != 0) return c;
  for (std::size_t i = 0; i < a.operands.size(); ++i) {
    if (auto c = a.operands[i] <=> b.operands[i]; c != 0) return c;
  }
  return std::strong_ordering::equal;
}

bool operator==(const Guard& a, const Guard& b) { return (a <=> b) == 0; }

namespace {

// Precedence: 1 = ||, 2 = &&, 3 = unary/atom.
int precedence(const Guard& g) {
  switch (g.kind) {
    case Guard::Kind::Or: return 1;
    case Guard::Kind::And: return 2;
    default: return 3;
  }
}

std::string print_guard(const Guard& g, int context) {
  std::string s;
  switch (g.kind) {
    case Guard::Kind::True: s = "tt"; break;
    case Guard::Kind::False: s = "ff"; break;
    case Guard::Kind::Count:
      s = "count(" + g.message + ", " + g.channel.sender + " -> " + g.channel.receiver + ") " +
          to_string(g.cmp) + " " + std::to_string(g.bound);
      break;
    case Guard::Kind::Member:
      s = g.message + " in " + g.channel.sender + " -> " + g.channel.receiver;
      break;
    case Guard::Kind::Not: s = "!" + print_guard(g.operands[0], 3); break;
    case Guard::Kind::Or:
      s = print_guard(g.operands[0], 1) + " || " + print_guard(g.operands[1], 2);
      break;
    case Guard::Kind::And:
      s = print_guard(g.operands[0], 2) + " && " + print_guard(g.operands[1], 3);
      break;
  }
  // Atoms with a comparator bind weaker than `!` syntactically, so parenthesize under negation.
  bool atom_under_not = context == 3 && g.kind == Guard::Kind::Count;
  if (precedence(g) < context || atom_under_not) return "(" + s + ")";
  return s;
}

}  // namespace

std::string to_string(const Guard& g) { return print_guard(g, 0); }

Guard desugar(const Guard& g) {
  switch (g.kind) {
    case Guard::Kind::True: {
      // tt = ¬φ ∨ φ for an arbitrary φ; any atom works.
      Guard atom = Guard::member("_", Channel{"_", "__"});
      return Guard::disj(Guard::negate(atom), atom);
    }
    case Guard::Kind::False: return Guard::negate(desugar(Guard::tt()));
    case Guard::Kind::Count:
    case Guard::Kind::Member: return g;
    case Guard::Kind::Not: return Guard::negate(desugar(g.operands[0]));
    case Guard::Kind::Or: return Guard::disj(desugar(g.operands[0]), desugar(g.operands[1]));
    case Guard::Kind::And:
      return Guard::negate(Guard::disj(Guard::negate(desugar(g.operands[0])),
                                       Guard::negate(desugar(g.operands[1]))));
  }
  return g;
}

// ---------------------------------------------------------------------------
// Choreographies

Choreography Choreography::interaction(ControlPoint cp, Participant from, Participant to, Message m) {
  Choreography g;
  g.kind = Kind::Interaction;
  g.cp = cp;
  g.sender = std::move(from);
  g.receiver = std::move(to);
  g.message = std::move(m);
  return g;
}

Choreography Choreography::seq(Choreography left, Choreography right) {
  Choreography g;
  g.kind = Kind::Seq;
  g.children.push_back(std::move(left));
  g.children.push_back(std::move(right));
  return g;
}

Choreography Choreography::par(ControlPoint cp, std::vector<Choreography> threads) {
  Choreography g;
  g.kind = Kind::Par;
  g.cp = cp;
  g.children = std::move(threads);
  return g;
}

Choreography Choreography::loop(ControlPoint cp, Choreography body, Participant controller) {
  Choreography g;
  g.kind = Kind::Loop;
  g.cp = cp;
  g.children.push_back(std::move(body));
  g.controller = std::move(controller);
  return g;
}

Choreography Choreography::choice(ControlPoint cp, std::vector<Choreography> branches,
                                  std::vector<Guard> guards) {
  Choreography g;
  g.kind = Kind::Choice;
  g.cp = cp;
  g.children = std::move(branches);
  g.guards = std::move(guards);
  return g;
}

bool operator==(const Choreography& a, const Choreography& b) {
  return a.kind == b.kind && a.cp == b.cp && a.sender == b.sender && a.receiver == b.receiver &&
         a.message == b.message && a.controller == b.controller && a.active_hint == b.active_hint &&
         a.children == b.children && a.guards == b.guards;
}

namespace {

void print_chor(const Choreography& g, bool with_cps, std::string& out);

std::string cp_annotation(const Choreography& g, bool with_cps) {
  return with_cps ? " @cp " + std::to_string(g.cp) : std::string{};
}

void print_term(const Choreography& g, bool with_cps, std::string& out) {
  if (g.kind == Choreography::Kind::Seq) {
    out += "(";
    print_chor(g, with_cps, out);
    out += ")";
  } else {
    print_chor(g, with_cps, out);
  }
}

void print_chor(const Choreography& g, bool with_cps, std::string& out) {
  using K = Choreography::Kind;
  switch (g.kind) {
    case K::Interaction:
      out += g.sender + " -> " + g.receiver + " : " + g.message + cp_annotation(g, with_cps);
      break;
    case K::Seq:
      // Left-nested sequences print flat; a right-nested Seq keeps its parentheses.
      print_chor(g.left(), with_cps, out);
      out += "; ";
      print_term(g.right(), with_cps, out);
      break;
    case K::Par:
      out += "par" + cp_annotation(g, with_cps) + " { ";
      for (std::size_t i = 0; i < g.children.size(); ++i) {
        if (i) out += " | ";
        print_chor(g.children[i], with_cps, out);
      }
      out += " }";
      break;
    case K::Loop:
      out += "loop" + cp_annotation(g, with_cps) + " @ " + g.controller + " { ";
      print_chor(g.body(), with_cps, out);
      out += " }";
      break;
    case K::Choice:
      out += "choice" + cp_annotation(g, with_cps);
      if (g.active_hint) out += " @ " + *g.active_hint;
      out += " { ";
      for (std::size_t i = 0; i < g.children.size(); ++i) {
        if (i) out += " + ";
        out += "{ ";
        print_chor(g.children[i], with_cps, out);
        out += " } unless ";
        out += i < g.guards.size() ? to_string(g.guards[i]) : "tt";
      }
      out += " }";
      break;
  }
}

template <class F>
void preorder(const Choreography& g, F&& visit) {
  visit(g);
  for (const auto& c : g.children) preorder(c, visit);
}

}  // namespace

std::string pretty_print(const Choreography& g, bool with_cps) {
  std::string out;
  print_chor(g, with_cps, out);
  return out;
}

std::string to_string(Violation::Kind k) {
  switch (k) {
    case Violation::Kind::DuplicateControlPoint: return "duplicate-control-point";
    case Violation::Kind::NonPositiveControlPoint: return "non-positive-control-point";
    case Violation::Kind::LoopControllerNotInBody: return "loop-controller-not-in-body";
    case Violation::Kind::ChoiceArity: return "choice-arity";
    case Violation::Kind::ParArity: return "par-arity";
    case Violation::Kind::SelfInteraction: return "self-interaction";
    case Violation::Kind::GuardArity: return "guard-arity";
  }
  return "unknown";
}

std::size_t ValidationReport::count(Violation::Kind k) const {
  return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                [k](const Violation& v) { return v.kind == k; }));
}

ValidationReport validate(const Choreography& g) {
  using K = Choreography::Kind;
  ValidationReport report;
  std::map<ControlPoint, int> seen;
  preorder(g, [&](const Choreography& n) {
    if (!n.has_cp()) return;
    if (n.cp <= 0) {
      report.violations.push_back({Violation::Kind::NonPositiveControlPoint, n.cp,
                                   "control point " + std::to_string(n.cp) + " is not positive"});
    }
    if (++seen[n.cp] == 2) {
      report.violations.push_back({Violation::Kind::DuplicateControlPoint, n.cp,
                                   "control point " + std::to_string(n.cp) + " occurs more than once"});
    }
    switch (n.kind) {
      case K::Interaction:
        if (n.sender == n.receiver) {
          report.violations.push_back({Violation::Kind::SelfInteraction, n.cp,
                                       n.sender + " sends " + n.message + " to itself"});
        }
        break;
      case K::Par:
        if (n.children.size() < 2) {
          report.violations.push_back({Violation::Kind::ParArity, n.cp, "par needs at least two threads"});
        }
        break;
      case K::Choice:
        if (n.children.size() < 2) {
          report.violations.push_back({Violation::Kind::ChoiceArity, n.cp, "choice needs at least two branches"});
        }
        if (n.guards.size() != n.children.size()) {
          report.violations.push_back({Violation::Kind::GuardArity, n.cp, "one guard per branch expected"});
        }
        break;
      case K::Loop:
        if (!participants(n.body()).contains(n.controller)) {
          report.violations.push_back({Violation::Kind::LoopControllerNotInBody, n.cp,
                                       n.controller + " does not occur in the loop body"});
        }
        break;
      case K::Seq:
        break;
    }
  });
  return report;
}

std::vector<ControlPoint> control_points(const Choreography& g) {
  std::vector<ControlPoint> out;
  preorder(g, [&](const Choreography& n) {
    if (n.has_cp()) out.push_back(n.cp);
  });
  return out;
}

std::set<Participant> participants(const Choreography& g) {
  std::set<Participant> out;
  preorder(g, [&](const Choreography& n) {
    if (n.kind == Choreography::Kind::Interaction) {
      out.insert(n.sender);
      out.insert(n.receiver);
    } else if (n.kind == Choreography::Kind::Loop) {
      out.insert(n.controller);
    }
  });
  return out;
}

const Choreography* find_node(const Choreography& g, ControlPoint cp) {
  if (g.has_cp() && g.cp == cp) return &g;
  for (const auto& c : g.children) {
    if (const auto* hit = find_node(c, cp)) return hit;
  }
  return nullptr;
}

std::variant<Event, GateMarker> event_of(ControlPoint cp, const Choreography& g) {
  const Choreography* node = find_node(g, cp);
  if (node == nullptr) throw std::out_of_range("no control point " + std::to_string(cp));
  if (node->kind == Choreography::Kind::Interaction) {
    return Event{{node->sender, node->receiver}, Polarity::Send, cp, node->message};
  }
  return GateMarker{cp};
}

Choreography strip_guards(const Choreography& g) {
  Choreography out = g;
  for (auto& guard : out.guards) guard = Guard::tt();
  for (auto& c : out.children) c = strip_guards(c);
  return out;
}

Choreography rename_control_points(const Choreography& g,
                                   const std::function<ControlPoint(ControlPoint)>& rename) {
  Choreography out = g;
  if (out.has_cp()) out.cp = rename(out.cp);
  for (auto& c : out.children) c = rename_control_points(c, rename);
  return out;
}

}  // namespace chorrev
