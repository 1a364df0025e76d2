#include <doctest.h>

#include <random>

#include "chorrev/machine.hpp"

using namespace chorrev;

namespace {

const Event kAlphabet[] = {
    {{"A", "B"}, Polarity::Send, 1, "m"},
    {{"A", "B"}, Polarity::Send, 2, "n"},
    {{"B", "A"}, Polarity::Receive, 3, "r"},
    {{"C", "A"}, Polarity::Receive, 4, "s"},
};

const Guard kGuards[] = {
    Guard::tt(),
    Guard::count("m", {"A", "B"}, Comparator::Less, 1),
    Guard::negate(Guard::member("r", {"B", "A"})),
};

PMachine random_pmachine(std::mt19937& rng, IdSource& ids, int max_states = 5) {
  PMachine m;
  m.owner = "A";
  const int n = 1 + static_cast<int>(rng() % max_states);
  std::vector<StateId> qs;
  for (int i = 0; i < n; ++i) {
    qs.push_back(ids.fresh());
    m.states.insert(qs.back());
  }
  m.initial = qs.front();
  m.interface = qs[rng() % n];
  const int edges = static_cast<int>(rng() % (2 * n + 1));
  for (int i = 0; i < edges; ++i) {
    Transition t{qs[rng() % n], kAlphabet[rng() % 4], Decoration::unit(), qs[rng() % n]};
    if (std::find(m.transitions.begin(), m.transitions.end(), t) == m.transitions.end()) m.transitions.push_back(t);
  }
  return m;
}

RCfsm as_rcfsm(const PMachine& m) { return RCfsm(m.owner, m.states, m.initial, m.transitions); }

// Label with the choice reference dropped: finalize renames states.
using Word = std::vector<std::tuple<Event, Decoration::Kind, Event, Guard>>;

template <class Edges>
void words(StateId q, const Edges& out, int depth, Word& prefix, std::set<Word>& acc) {
  acc.insert(prefix);
  if (depth == 0) return;
  auto it = out.find(q);
  if (it == out.end()) return;
  for (const Transition* t : it->second) {
    prefix.emplace_back(t->event, t->decoration.kind, t->decoration.first_output, t->decoration.guard);
    words(t->to, out, depth - 1, prefix, acc);
    prefix.pop_back();
  }
}

std::set<Word> language(StateId initial, const std::vector<Transition>& ts, int depth) {
  std::map<StateId, std::vector<const Transition*>> out;
  for (const auto& t : ts) out[t.from].push_back(&t);
  std::set<Word> acc;
  Word prefix;
  words(initial, out, depth, prefix, acc);
  return acc;
}

PMachine back_to_pmachine(const RCfsm& m) {
  PMachine p;
  p.owner = m.owner();
  p.states = m.states();
  p.initial = m.initial();
  p.interface = m.initial();
  p.transitions = m.transitions();
  return p;
}

}  // namespace

TEST_CASE("forget undoes decoration on random machines") {
  std::mt19937 rng(2024);
  IdSource ids;
  for (int i = 0; i < 1000; ++i) {
    PMachine m = random_pmachine(rng, ids);
    std::vector<StateId> qs(m.states.begin(), m.states.end());
    StateId q = qs[rng() % qs.size()];
    PMachine d = decorate(m, q, kAlphabet[rng() % 2], kGuards[rng() % 3]);
    CHECK(forget_machine(as_rcfsm(d)) == as_rcfsm(m));
  }
}

TEST_CASE("decorate marks transitions into the interface as committed") {
  IdSource ids;
  PMachine a = PMachine::single("A", kAlphabet[0], ids);
  PMachine b = PMachine::single("A", kAlphabet[2], ids);
  PMachine m = seq(a, b);
  PMachine d = decorate(m, m.initial, kAlphabet[0], kGuards[1]);
  REQUIRE(d.transitions.size() == 2);
  for (const auto& t : d.transitions) {
    CHECK(t.decoration.choice_state == m.initial);
    CHECK(t.decoration.kind == (t.to == m.interface ? Decoration::Kind::Committed : Decoration::Kind::Ongoing));
  }
  CHECK_THROWS_AS(decorate(d, m.initial, kAlphabet[0], kGuards[0]), MachineError);
}

TEST_CASE("substitution commutes with decoration") {
  std::mt19937 rng(7);
  IdSource ids;
  for (int i = 0; i < 300; ++i) {
    PMachine m = random_pmachine(rng, ids);
    std::vector<StateId> qs(m.states.begin(), m.states.end());
    // injective renaming onto fresh ids
    Substitution theta;
    for (auto q : qs) theta[q] = ids.fresh();
    StateId q = qs[rng() % qs.size()];
    const Event& e = kAlphabet[rng() % 2];
    const Guard& g = kGuards[rng() % 3];
    PMachine lhs = chorrev::apply(theta, decorate(m, q, e, g));
    PMachine rhs = decorate(chorrev::apply(theta, m), chorrev::apply(theta, q), e, g);
    CHECK(as_rcfsm(lhs) == as_rcfsm(rhs));
    CHECK(lhs.interface == rhs.interface);
  }
}

TEST_CASE("seq, join and product") {
  IdSource ids;
  PMachine a = PMachine::single("A", kAlphabet[0], ids);
  PMachine b = PMachine::single("A", kAlphabet[1], ids);
  PMachine s = seq(a, b);
  CHECK(s.initial == a.initial);
  CHECK(s.interface == b.interface);
  CHECK(s.states.size() == 3);

  PMachine c = PMachine::single("A", kAlphabet[2], ids);
  PMachine j = join(b, c);
  CHECK(j.states.size() == 2);
  CHECK(j.transitions.size() == 2);

  PMachine p = product(PMachine::single("A", kAlphabet[0], ids), PMachine::single("A", kAlphabet[2], ids), ids);
  CHECK(p.states.size() == 4);
  CHECK(p.transitions.size() == 4);
  RCfsm f = finalize(p);
  CHECK(f.states().size() == 4);
  CHECK(language(f.initial(), f.transitions(), 2).count(
      Word{{kAlphabet[2], Decoration::Kind::Unit, Event{}, Guard::tt()},
           {kAlphabet[0], Decoration::Kind::Unit, Event{}, Guard::tt()}}));

  CHECK_THROWS_AS(seq(a, a), MachineError);
  PMachine e = PMachine::empty("A", ids);
  CHECK(e.is_empty());
  CHECK_THROWS_AS(join(e, PMachine::single("A", kAlphabet[0], ids)), MachineError);
}

TEST_CASE("finalize is deterministic, idempotent and keeps the language") {
  std::mt19937 rng(99);
  IdSource ids;
  for (int i = 0; i < 300; ++i) {
    PMachine m = random_pmachine(rng, ids, 6);
    const bool decorated = rng() % 2;
    if (decorated) m = decorate(m, m.initial, kAlphabet[rng() % 2], kGuards[rng() % 3]);
    RCfsm f;
    try {
      f = finalize(m);
    } catch (const MachineError&) {
      // an event reaching both the interface and elsewhere gets two decorations
      CHECK(decorated);
      continue;
    }
    CHECK(f.deterministic());
    CHECK(f.initial() == StateId{0});
    CHECK(finalize(back_to_pmachine(f)) == f);
    CHECK(language(m.initial, m.transitions, 8) == language(f.initial(), f.transitions(), 8));
  }
}

TEST_CASE("finalize rejects conflicting decorations") {
  IdSource ids;
  PMachine a = PMachine::single("A", kAlphabet[0], ids);
  PMachine b = PMachine::single("A", kAlphabet[0], ids);
  PMachine da = decorate(a, a.initial, kAlphabet[0], kGuards[0]);
  PMachine db = decorate(b, a.initial, kAlphabet[0], kGuards[1]);
  PMachine both;
  both.owner = "A";
  both.initial = a.initial;
  both.interface = a.interface;
  both.states = {a.initial, a.interface, b.interface};
  both.transitions = {da.transitions[0], {a.initial, kAlphabet[0], db.transitions[0].decoration, b.interface}};
  CHECK_THROWS_AS(finalize(both), MachineError);
}

TEST_CASE("shifted and aliases") {
  IdSource ids;
  RCfsm f = finalize(seq(PMachine::single("T", kAlphabet[0], ids), PMachine::single("T", kAlphabet[1], ids)));
  CHECK(f.alias(StateId{0}) == "q0T");
  CHECK(f.alias(StateId{2}) == "q2T");
  RCfsm g = f.shifted(10);
  CHECK(g.initial() == StateId{10});
  CHECK(g.alias(StateId{12}) == "q2T");
  CHECK(g.outgoing(StateId{10}).size() == 1);
  CHECK(to_dot(f).find("digraph") != std::string::npos);
}
