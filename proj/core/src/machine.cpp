#include "chorrev/machine.hpp"

#include <algorithm>
#include <deque>
#include <sstream>

namespace chorrev {

PMachine PMachine::empty(Participant owner, IdSource& ids) {
  PMachine m;
  m.owner = std::move(owner);
  m.initial = m.interface = ids.fresh();
  m.states = {m.initial};
  return m;
}

PMachine PMachine::single(Participant owner, Event e, IdSource& ids) {
  PMachine m;
  m.owner = std::move(owner);
  m.initial = ids.fresh();
  m.interface = ids.fresh();
  m.states = {m.initial, m.interface};
  m.transitions.push_back({m.initial, std::move(e), Decoration::unit(), m.interface});
  return m;
}

RCfsm::RCfsm(Participant owner, std::set<StateId> states, StateId initial, std::vector<Transition> transitions,
             std::map<StateId, std::string> aliases)
    : owner_(std::move(owner)),
      states_(std::move(states)),
      initial_(initial),
      transitions_(std::move(transitions)),
      aliases_(std::move(aliases)) {
  std::sort(transitions_.begin(), transitions_.end());
  transitions_.erase(std::unique(transitions_.begin(), transitions_.end()), transitions_.end());
}

std::span<const Transition> RCfsm::outgoing(StateId q) const {
  auto lo = std::lower_bound(transitions_.begin(), transitions_.end(), q,
                             [](const Transition& t, StateId s) { return t.from < s; });
  auto hi = std::upper_bound(lo, transitions_.end(), q, [](StateId s, const Transition& t) { return s < t.from; });
  return {lo, hi};
}

std::string RCfsm::alias(StateId q) const {
  auto it = aliases_.find(q);
  if (it != aliases_.end()) return it->second;
  return "#" + std::to_string(q.value);
}

bool RCfsm::deterministic() const {
  for (std::size_t i = 0; i + 1 < transitions_.size(); ++i) {
    for (std::size_t j = i + 1; j < transitions_.size() && transitions_[j].from == transitions_[i].from; ++j) {
      if (transitions_[i].event == transitions_[j].event) return false;
    }
  }
  return true;
}

RCfsm RCfsm::shifted(int offset) const {
  auto sh = [&](StateId q) { return StateId{q.value + offset}; };
  std::set<StateId> states;
  for (auto q : states_) states.insert(sh(q));
  std::vector<Transition> ts;
  for (auto t : transitions_) {
    t.from = sh(t.from);
    t.to = sh(t.to);
    if (!t.decoration.is_unit()) t.decoration.choice_state = sh(t.decoration.choice_state);
    ts.push_back(std::move(t));
  }
  std::map<StateId, std::string> aliases;
  for (const auto& [q, name] : aliases_) aliases[sh(q)] = name;
  return RCfsm(owner_, std::move(states), sh(initial_), std::move(ts), std::move(aliases));
}

StateId apply(const Substitution& theta, StateId q) {
  auto it = theta.find(q);
  return it == theta.end() ? q : it->second;
}

Decoration apply(const Substitution& theta, const Decoration& d) {
  Decoration out = d;
  if (!d.is_unit()) out.choice_state = chorrev::apply(theta, d.choice_state);
  return out;
}

PMachine apply(const Substitution& theta, const PMachine& m) {
  PMachine out;
  out.owner = m.owner;
  for (auto q : m.states) out.states.insert(chorrev::apply(theta, q));
  out.initial = chorrev::apply(theta, m.initial);
  out.interface = chorrev::apply(theta, m.interface);
  for (const auto& t : m.transitions) {
    Transition u{chorrev::apply(theta, t.from), t.event, chorrev::apply(theta, t.decoration), chorrev::apply(theta, t.to)};
    if (std::find(out.transitions.begin(), out.transitions.end(), u) == out.transitions.end()) {
      out.transitions.push_back(std::move(u));
    }
  }
  return out;
}

PMachine decorate(const PMachine& m, StateId choice_state, const Event& first_output, const Guard& guard) {
  PMachine out = m;
  for (auto& t : out.transitions) {
    if (!t.decoration.is_unit()) throw MachineError("decorate: machine already decorated");
    t.decoration = t.to == m.interface ? Decoration::committed(choice_state, first_output, guard)
                                       : Decoration::ongoing(choice_state, first_output, guard);
  }
  out.states.insert(choice_state);
  return out;
}

namespace {

void require_disjoint(const PMachine& m1, const PMachine& m2, const char* op) {
  for (auto q : m1.states) {
    if (m2.states.count(q)) {
      throw MachineError(std::string(op) + ": state #" + std::to_string(q.value) + " occurs in both machines");
    }
  }
}

PMachine merge(PMachine a, const PMachine& b) {
  a.states.insert(b.states.begin(), b.states.end());
  for (const auto& t : b.transitions) {
    if (std::find(a.transitions.begin(), a.transitions.end(), t) == a.transitions.end()) a.transitions.push_back(t);
  }
  return a;
}

}  // namespace

PMachine seq(const PMachine& m1, const PMachine& m2) {
  require_disjoint(m1, m2, "seq");
  PMachine left = chorrev::apply({{m1.interface, m2.initial}}, m1);
  PMachine out = merge(std::move(left), m2);
  out.interface = m2.interface;
  return out;
}

PMachine join(const PMachine& m1, const PMachine& m2) {
  require_disjoint(m1, m2, "join");
  if ((m1.initial == m1.interface) != (m2.initial == m2.interface)) {
    throw MachineError("join: one machine has its initial state as interface and the other does not");
  }
  PMachine left = chorrev::apply({{m1.interface, m2.interface}, {m1.initial, m2.initial}}, m1);
  PMachine out = merge(std::move(left), m2);
  out.initial = m2.initial;
  out.interface = m2.interface;
  return out;
}

PMachine product(const PMachine& m1, const PMachine& m2, IdSource& ids) {
  require_disjoint(m1, m2, "product");
  std::map<std::pair<StateId, StateId>, StateId> pair;
  for (auto p : m1.states) {
    for (auto q : m2.states) pair[{p, q}] = ids.fresh();
  }
  PMachine out;
  out.owner = m1.owner;
  for (const auto& [_, id] : pair) out.states.insert(id);
  out.initial = pair.at({m1.initial, m2.initial});
  out.interface = pair.at({m1.interface, m2.interface});

  auto remap = [&](const Decoration& d, auto&& at) {
    Decoration r = d;
    if (!d.is_unit()) r.choice_state = at(d.choice_state);
    return r;
  };
  for (const auto& t : m1.transitions) {
    for (auto q : m2.states) {
      auto at = [&](StateId p) { return pair.at({p, q}); };
      out.transitions.push_back({at(t.from), t.event, remap(t.decoration, at), at(t.to)});
    }
  }
  for (const auto& t : m2.transitions) {
    for (auto p : m1.states) {
      auto at = [&](StateId q) { return pair.at({p, q}); };
      out.transitions.push_back({at(t.from), t.event, remap(t.decoration, at), at(t.to)});
    }
  }
  return out;
}

namespace {

using Label = std::pair<Event, Decoration>;

struct Dfa {
  std::vector<std::set<StateId>> subsets;
  // per state: label -> target index; choice refs already in dfa indices
  std::vector<std::map<Label, int>> edges;
};

Dfa determinize(const PMachine& m) {
  Dfa dfa;
  std::map<std::set<StateId>, int> index;
  std::deque<int> work;
  auto intern = [&](std::set<StateId> s) {
    auto [it, fresh] = index.try_emplace(s, static_cast<int>(dfa.subsets.size()));
    if (fresh) {
      dfa.subsets.push_back(std::move(s));
      dfa.edges.emplace_back();
      work.push_back(it->second);
    }
    return it->second;
  };
  intern({m.initial});

  std::map<StateId, std::vector<const Transition*>> out;
  for (const auto& t : m.transitions) out[t.from].push_back(&t);

  while (!work.empty()) {
    int s = work.front();
    work.pop_front();
    std::map<Label, std::set<StateId>> grouped;
    for (auto q : dfa.subsets[s]) {
      for (const auto* t : out[q]) grouped[{t->event, t->decoration}].insert(t->to);
    }
    const Label* prev = nullptr;
    for (const auto& entry : grouped) {
      if (prev && prev->first == entry.first.first) {
        throw MachineError("finalize: determinization conflict on " + to_string(entry.first.first) +
                           " with decorations " + to_string(prev->second) + " and " +
                           to_string(entry.first.second));
      }
      prev = &entry.first;
    }
    for (auto& [label, targets] : grouped) {
      int target = intern(targets);
      dfa.edges[s][label] = target;
    }
  }

  // Choice references: prefer the singleton subset, else the first subset containing the state.
  auto locate = [&](StateId q) {
    auto it = index.find({q});
    if (it != index.end()) return it->second;
    for (std::size_t i = 0; i < dfa.subsets.size(); ++i) {
      if (dfa.subsets[i].count(q)) return static_cast<int>(i);
    }
    throw MachineError("finalize: choice state #" + std::to_string(q.value) + " is unreachable");
  };
  for (auto& edges : dfa.edges) {
    std::map<Label, int> remapped;
    for (auto& [label, target] : edges) {
      Label l = label;
      if (!l.second.is_unit()) l.second.choice_state = StateId{locate(l.second.choice_state)};
      remapped[l] = target;
    }
    edges = std::move(remapped);
  }
  return dfa;
}

}  // namespace

RCfsm finalize(const PMachine& m) {
  Dfa dfa = determinize(m);
  const int n = static_cast<int>(dfa.subsets.size());

  // Moore refinement; every state is accepting.
  std::vector<int> block(n, 0);
  for (;;) {
    std::map<std::pair<int, std::vector<std::pair<Label, int>>>, int> sigs;
    std::vector<int> next(n);
    for (int s = 0; s < n; ++s) {
      std::vector<std::pair<Label, int>> sig;
      for (const auto& [label, target] : dfa.edges[s]) sig.emplace_back(label, block[target]);
      auto [it, _] = sigs.try_emplace({block[s], std::move(sig)}, static_cast<int>(sigs.size()));
      next[s] = it->second;
    }
    bool stable = sigs.size() == static_cast<std::size_t>(*std::max_element(block.begin(), block.end()) + 1);
    block = std::move(next);
    if (stable) break;
  }

  std::map<int, std::set<int>> refs_per_block;
  for (const auto& edges : dfa.edges) {
    for (const auto& [label, _] : edges) {
      if (!label.second.is_unit()) {
        int ref = label.second.choice_state.value;
        refs_per_block[block[ref]].insert(ref);
      }
    }
  }
  for (const auto& [b, refs] : refs_per_block) {
    if (refs.size() > 1) throw MachineError("finalize: distinct choice states merged by minimization");
  }

  // Breadth-first renumbering of blocks from the initial block.
  std::map<int, int> order;
  std::deque<int> work{block[0]};
  order[block[0]] = 0;
  std::map<int, int> some_member;
  for (int s = n - 1; s >= 0; --s) some_member[block[s]] = s;
  while (!work.empty()) {
    int b = work.front();
    work.pop_front();
    for (const auto& [label, target] : dfa.edges[some_member[b]]) {
      if (order.try_emplace(block[target], static_cast<int>(order.size())).second) work.push_back(block[target]);
    }
  }
  auto id_of = [&](int dfa_state) {
    auto it = order.find(block[dfa_state]);
    if (it == order.end()) throw MachineError("finalize: reference to unreachable state");
    return StateId{it->second};
  };

  std::set<StateId> states;
  std::map<StateId, std::string> aliases;
  std::vector<Transition> transitions;
  for (const auto& [b, k] : order) {
    StateId q{k};
    states.insert(q);
    aliases[q] = "q" + std::to_string(k) + m.owner;
    for (const auto& [label, target] : dfa.edges[some_member[b]]) {
      Decoration d = label.second;
      if (!d.is_unit()) d.choice_state = id_of(d.choice_state.value);
      transitions.push_back({q, label.first, std::move(d), id_of(target)});
    }
  }
  return RCfsm(m.owner, std::move(states), StateId{0}, std::move(transitions), std::move(aliases));
}

RCfsm forget_machine(const RCfsm& m) {
  std::vector<Transition> ts;
  for (auto t : m.transitions()) {
    t.decoration = Decoration::unit();
    ts.push_back(std::move(t));
  }
  return RCfsm(m.owner(), m.states(), m.initial(), std::move(ts), m.aliases());
}

std::string to_string(const Decoration& d, const RCfsm* names) {
  if (d.is_unit()) return "";
  std::string q = names ? names->alias(d.choice_state) : "#" + std::to_string(d.choice_state.value);
  std::string mark = d.kind == Decoration::Kind::Ongoing ? "\xE2\x96\xB8" : "\xE2\x96\xB8\xCC\x85";
  return mark + "(" + q + ", " + to_string(d.first_output) + ", " + to_string(d.guard) + ")";
}

namespace {

std::string label_of(const Transition& t, const RCfsm& m) {
  std::string s = to_string(t.event);
  if (!t.decoration.is_unit()) s += " " + to_string(t.decoration, &m);
  return s;
}

std::string dot_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out;
}

}  // namespace

std::string to_dot(const RCfsm& m) {
  std::ostringstream os;
  os << "digraph \"" << dot_escape(m.owner()) << "\" {\n";
  os << "  rankdir=LR;\n";
  os << "  __start [shape=point];\n";
  for (auto q : m.states()) os << "  \"" << dot_escape(m.alias(q)) << "\";\n";
  os << "  __start -> \"" << dot_escape(m.alias(m.initial())) << "\";\n";
  for (const auto& t : m.transitions()) {
    os << "  \"" << dot_escape(m.alias(t.from)) << "\" -> \"" << dot_escape(m.alias(t.to)) << "\" [label=\""
       << dot_escape(label_of(t, m)) << "\"];\n";
  }
  os << "}\n";
  return os.str();
}

std::string describe(const RCfsm& m) {
  std::ostringstream os;
  os << m.owner() << ": initial " << m.alias(m.initial()) << ", " << m.states().size() << " states\n";
  for (const auto& t : m.transitions()) {
    os << "  " << m.alias(t.from) << " --" << label_of(t, m) << "--> " << m.alias(t.to) << "\n";
  }
  return os.str();
}

}  // namespace chorrev
