#include "chorrev/projection.hpp"

#include <deque>

#include "chorrev/order.hpp"

namespace chorrev {

namespace {

void collect_loops(const Choreography& g, std::vector<LoopWiring>& out) {
  if (g.kind == Choreography::Kind::Loop) {
    out.push_back({g.cp, g.controller, participants(g.body())});
  }
  for (const auto& c : g.children) collect_loops(c, out);
}

PMachine disjoint_union(PMachine a, const PMachine& b) {
  a.states.insert(b.states.begin(), b.states.end());
  a.transitions.insert(a.transitions.end(), b.transitions.begin(), b.transitions.end());
  return a;
}

// Decorates the unit transitions only; a nested choice of the same active
// participant keeps its own decorations.
PMachine decorate_outer(const PMachine& m, StateId q, const Event& e, const Guard& phi) {
  PMachine out = m;
  for (auto& t : out.transitions) {
    if (!t.decoration.is_unit()) continue;
    t.decoration = t.to == m.interface ? Decoration::committed(q, e, phi) : Decoration::ongoing(q, e, phi);
  }
  out.states.insert(q);
  return out;
}

// One piece per initial transition, each a copy of the part reachable after it.
std::vector<PMachine> split_first_outputs(const PMachine& m, IdSource& ids) {
  std::vector<Transition> first;
  for (const auto& t : m.transitions) {
    if (t.from == m.initial) first.push_back(t);
  }
  if (first.size() <= 1) return {m};

  std::vector<PMachine> pieces;
  for (const auto& t0 : first) {
    std::set<StateId> seen{t0.to};
    std::deque<StateId> work{t0.to};
    while (!work.empty()) {
      StateId q = work.front();
      work.pop_front();
      for (const auto& t : m.transitions) {
        if (t.from == q && seen.insert(t.to).second) work.push_back(t.to);
      }
    }
    PMachine piece;
    piece.owner = m.owner;
    piece.initial = ids.fresh();
    piece.interface = ids.fresh();
    Substitution copy{{m.interface, piece.interface}};
    for (auto q : seen) {
      if (q != m.interface) copy[q] = ids.fresh();
    }
    piece.states = {piece.initial, piece.interface};
    for (const auto& [_, q] : copy) piece.states.insert(q);
    piece.transitions.push_back({piece.initial, t0.event, chorrev::apply(copy, t0.decoration), chorrev::apply(copy, t0.to)});
    for (const auto& t : m.transitions) {
      if (seen.count(t.from) && t.from != m.interface) {
        piece.transitions.push_back({chorrev::apply(copy, t.from), t.event, chorrev::apply(copy, t.decoration), chorrev::apply(copy, t.to)});
      }
    }
    pieces.push_back(std::move(piece));
  }
  return pieces;
}

PMachine product_all(const std::vector<PMachine>& ms, const Participant& owner, IdSource& ids) {
  if (ms.empty()) return PMachine::empty(owner, ids);
  PMachine acc = ms.front();
  for (std::size_t i = 1; i < ms.size(); ++i) acc = product(acc, ms[i], ids);
  return acc;
}

PMachine join_all(std::vector<PMachine> ms, ControlPoint cp) {
  bool any_empty = false, any_full = false;
  for (const auto& m : ms) (m.initial == m.interface ? any_empty : any_full) = true;
  if (any_empty && any_full) {
    throw ProjectionError("choice " + std::to_string(cp) + ": participant occurs in some branches only");
  }
  PMachine acc = ms.front();
  for (std::size_t i = 1; i < ms.size(); ++i) acc = join(acc, ms[i]);
  return acc;
}

Event loop_event(const Participant& from, const Participant& to, Polarity p, ControlPoint cp, const Message& m) {
  return Event{{from, to}, p, cp, m};
}

PMachine proj(const Choreography& g, const Participant& a, IdSource& ids) {
  using K = Choreography::Kind;
  switch (g.kind) {
    case K::Interaction: {
      Channel c{g.sender, g.receiver};
      if (a == g.sender) return PMachine::single(a, Event{c, Polarity::Send, g.cp, g.message}, ids);
      if (a == g.receiver) return PMachine::single(a, Event{c, Polarity::Receive, g.cp, g.message}, ids);
      return PMachine::empty(a, ids);
    }
    case K::Seq: {
      PMachine left = proj(g.left(), a, ids);
      PMachine right = proj(g.right(), a, ids);
      return seq(left, right);
    }
    case K::Par: {
      std::vector<PMachine> threads;
      for (const auto& t : g.children) threads.push_back(proj(t, a, ids));
      return product_all(threads, a, ids);
    }
    case K::Choice: {
      auto active = active_participant(g);
      if (!is_defined(active)) throw ProjectionError(std::get<Undefined>(active).reason);
      std::vector<PMachine> parts;
      for (std::size_t b = 0; b < g.children.size(); ++b) {
        PMachine branch = proj(g.children[b], a, ids);
        if (a != std::get<Participant>(active)) {
          parts.push_back(std::move(branch));
          continue;
        }
        for (auto& piece : split_first_outputs(branch, ids)) {
          Event e;
          for (const auto& t : piece.transitions) {
            if (t.from == piece.initial) e = t.event;
          }
          parts.push_back(decorate_outer(piece, piece.initial, e, g.guards[b]));
        }
      }
      return join_all(std::move(parts), g.cp);
    }
    case K::Loop: {
      std::set<Participant> in_body = participants(g.body());
      if (!in_body.count(a)) return PMachine::empty(a, ids);
      PMachine body = proj(g.body(), a, ids);
      const StateId s = body.initial, t = body.interface;

      auto control = [&](const Message& m) {
        if (a == g.controller) {
          std::vector<PMachine> sends;
          for (const auto& b : in_body) {
            if (b != a) sends.push_back(PMachine::single(a, loop_event(a, b, Polarity::Send, g.cp, m), ids));
          }
          if (sends.empty()) throw ProjectionError("loop " + std::to_string(g.cp) + ": controller interacts with nobody");
          return product_all(sends, a, ids);
        }
        return PMachine::single(a, loop_event(g.controller, a, Polarity::Receive, g.cp, m), ids);
      };

      PMachine entry = control(kStartLoop);
      PMachine again = control(kStartLoop);
      again = chorrev::apply({{again.initial, t}, {again.interface, s}}, again);
      PMachine exit = control(kEndLoop);
      exit = chorrev::apply({{exit.initial, t}}, exit);

      PMachine out = seq(entry, body);
      out = disjoint_union(std::move(out), again);
      out = disjoint_union(std::move(out), exit);
      out.interface = exit.interface;
      return out;
    }
  }
  throw ProjectionError("unknown construct");
}

void require_projectable(const Choreography& g) {
  auto report = validate(g);
  if (!report.ok()) {
    const auto& v = report.violations.front();
    throw ProjectionError("invalid choreography: " + to_string(v.kind) + " at " + std::to_string(v.cp));
  }
  auto sem = semantics(g);
  if (!is_defined(sem)) {
    const auto& u = std::get<Undefined>(sem);
    throw ProjectionError("undefined order at " + u.construct + ": " + u.reason);
  }
}

}  // namespace

std::vector<LoopWiring> loop_wirings(const Choreography& g) {
  std::vector<LoopWiring> out;
  collect_loops(g, out);
  return out;
}

PMachine project_pmachine(const Choreography& g, const Participant& a, IdSource& ids) {
  return proj(g, a, ids);
}

RCfsm project(const Choreography& g, const Participant& a) {
  require_projectable(g);
  IdSource ids;
  return finalize(proj(g, a, ids));
}

System project_system(const Choreography& g) {
  require_projectable(g);
  System sys;
  int offset = 0;
  for (const auto& a : participants(g)) {
    IdSource ids;
    RCfsm m = finalize(proj(g, a, ids)).shifted(offset);
    offset += static_cast<int>(m.states().size());
    sys.emplace(a, std::move(m));
  }
  return sys;
}

}  // namespace chorrev
