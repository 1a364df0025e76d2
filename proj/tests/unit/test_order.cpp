#include <doctest.h>

#include "../support.hpp"
#include "chorrev/order.hpp"

using namespace chorrev;

namespace {

Event send(ControlPoint cp, Participant a, Participant b, Message m) {
  return {{std::move(a), std::move(b)}, Polarity::Send, cp, std::move(m)};
}
Event recv(ControlPoint cp, Participant a, Participant b, Message m) {
  return {{std::move(a), std::move(b)}, Polarity::Receive, cp, std::move(m)};
}

bool le(const EventOrder& o, const Event& a, const Event& b) {
  auto i = o.find_event(a), j = o.find_event(b);
  REQUIRE(i);
  REQUIRE(j);
  return o.precedes(*i, *j);
}

}  // namespace

TEST_CASE("single interaction: send before receive") {
  auto sem = semantics(test::load("single.rchor"));
  REQUIRE(is_defined(sem));
  const auto& o = std::get<EventOrder>(sem);
  CHECK(o.size() == 2);
  CHECK(le(o, send(1, "A", "B", "m"), recv(1, "A", "B", "m")));
  CHECK_FALSE(le(o, recv(1, "A", "B", "m"), send(1, "A", "B", "m")));
  CHECK(o.strict_pairs().size() == 1);
}

TEST_CASE("sequential composition shapes") {
  struct Shape {
    const char* text;
    bool defined;
  };
  const Shape shapes[] = {
      {"A -> B : m; A -> C : n", true},
      {"A -> B : m; B -> C : n", true},
      {"A -> B : m; B -> A : n", true},
      {"A -> B : m; A -> B : n", true},
      {"A -> B : m; C -> D : n", false},
  };
  for (const auto& s : shapes) {
    CAPTURE(s.text);
    auto sem = semantics(parse_choreography(s.text));
    CHECK(is_defined(sem) == s.defined);
    if (is_defined(sem)) {
      const auto& o = std::get<EventOrder>(sem);
      CHECK(o.is_partial_order());
      // the right interaction is aware of the left one
      CHECK(o.precedes(0, 3));
      CHECK_FALSE(o.precedes(3, 0));
    }
  }
}

TEST_CASE("disjoint subjects report a witness") {
  auto sem = semantics(parse_choreography("A -> B : m; C -> D : n"));
  REQUIRE_FALSE(is_defined(sem));
  const auto& u = std::get<Undefined>(sem);
  CHECK(u.construct.find("seq") != std::string::npos);
  REQUIRE(u.witness);
  CHECK(u.witness->first == to_string(send(1, "A", "B", "m")));
  CHECK(u.witness->second == to_string(send(2, "C", "D", "n")));
}

TEST_CASE("travel agency order") {
  auto g = test::load("travel.rchor");
  auto sem = semantics(g);
  REQUIRE(is_defined(sem));
  const auto& o = std::get<EventOrder>(sem);
  CHECK(o.is_partial_order());
  CHECK(le(o, send(4, "T", "B", "flight"), recv(5, "B", "T", "flightPrice")));
  CHECK(le(o, send(8, "T", "B", "dest"), send(10, "T", "D", "upd")));
  CHECK(le(o, send(4, "T", "B", "flight"), send(10, "T", "D", "upd")));
  // the two threads of the par are unordered
  CHECK_FALSE(le(o, send(4, "T", "B", "flight"), send(6, "T", "B", "car")));
  CHECK_FALSE(le(o, send(6, "T", "B", "car"), send(4, "T", "B", "flight")));
  // alternative branches are unordered
  CHECK_FALSE(le(o, send(4, "T", "B", "flight"), send(8, "T", "B", "dest")));

  auto start = o.find_gate(OrderNode::Kind::LoopStart, 1);
  auto end = o.find_gate(OrderNode::Kind::LoopEnd, 1);
  auto gate = o.find_gate(OrderNode::Kind::ChoiceGate, 2);
  REQUIRE(start);
  REQUIRE(end);
  REQUIRE(gate);
  for (std::size_t i = 0; i < o.size(); ++i) {
    if (o.node(i).kind != OrderNode::Kind::Event) continue;
    CHECK(o.precedes(*start, i));
    CHECK(o.precedes(i, *end));
    if (o.node(i).event.cp != 10) CHECK(o.precedes(*gate, i));
  }
  CHECK(o.minimal() == std::vector<std::size_t>{*start});
}

TEST_CASE("semantics ignores guards") {
  for (const char* f : {"travel.rchor", "fork.rchor", "both_true.rchor"}) {
    CAPTURE(f);
    auto g = test::load(f);
    auto a = semantics(g), b = semantics(strip_guards(g));
    REQUIRE(is_defined(a));
    REQUIRE(is_defined(b));
    CHECK(std::get<EventOrder>(a) == std::get<EventOrder>(b));
  }
}

TEST_CASE("active participant") {
  auto g = test::load("travel.rchor");
  auto a = active_participant(*find_node(g, 2));
  REQUIRE(is_defined(a));
  CHECK(std::get<Participant>(a) == "T");

  auto two = parse_choreography("choice { { A -> B : m } unless tt + { C -> B : m } unless tt }");
  CHECK_FALSE(is_defined(active_participant(two)));

  auto single = parse_choreography("choice { { A -> B : x } unless tt + { A -> B : y } unless tt }");
  CHECK(std::get<Participant>(active_participant(single)) == "A");

  // permuting branches does not matter
  auto swapped = *find_node(g, 2);
  std::swap(swapped.children[0], swapped.children[1]);
  std::swap(swapped.guards[0], swapped.guards[1]);
  CHECK(std::get<Participant>(active_participant(swapped)) == "T");
}

TEST_CASE("well-branchedness") {
  auto g = test::load("travel.rchor");
  CHECK(well_branched(*find_node(g, 2)).ok);

  auto same = parse_choreography("choice { { A -> B : m } unless tt + { A -> B : m } unless tt }");
  CHECK_FALSE(well_branched(same).ok);

  auto partial = parse_choreography(
      "choice { { A -> B : x; A -> C : z } unless tt + { A -> B : y } unless tt }");
  CHECK_FALSE(well_branched(partial).ok);
  CHECK_FALSE(is_defined(semantics(partial)));

  auto nonlocal = parse_choreography(
      "choice { { A -> B : x } unless count(x, B -> C) < 1 + { A -> B : y } unless tt }");
  auto r = well_branched(nonlocal);
  CHECK_FALSE(r.ok);
  CHECK_FALSE(r.problems.empty());
}

TEST_CASE("guard locality") {
  CHECK(guard_local(Guard::count("upd", {"T", "D"}, Comparator::Less, 1), "T"));
  CHECK_FALSE(guard_local(Guard::count("x", {"B", "D"}, Comparator::Less, 1), "T"));
  CHECK(guard_local(Guard::tt(), "T"));
  CHECK(guard_local(Guard::member("m", {"B", "T"}), "T"));
}

TEST_CASE("loops: body order plus bracketing gates") {
  auto sem = semantics(test::load("ping_loop.rchor"));
  REQUIRE(is_defined(sem));
  const auto& o = std::get<EventOrder>(sem);
  CHECK(o.size() == 6);
  CHECK(le(o, send(2, "A", "B", "m"), send(3, "B", "A", "n")));
  CHECK_FALSE(le(o, send(3, "B", "A", "n"), send(2, "A", "B", "m")));
}
