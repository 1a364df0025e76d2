#include <doctest.h>

#include <random>

#include "../support.hpp"
#include "chorrev/ast.hpp"
#include "chorrev/runtime.hpp"

using namespace chorrev;

TEST_CASE("parser numbers control points in preorder") {
  auto g = test::load("travel.rchor");
  CHECK(control_points(g) == std::vector<ControlPoint>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(g.kind == Choreography::Kind::Loop);
  CHECK(g.controller == "T");
  CHECK(participants(g) == std::set<Participant>{"B", "D", "T"});

  const Choreography* upd = find_node(g, 10);
  REQUIRE(upd);
  CHECK(upd->kind == Choreography::Kind::Interaction);
  CHECK(upd->sender == "T");
  CHECK(upd->receiver == "D");
  CHECK(upd->message == "upd");

  const Choreography* choice = find_node(g, 2);
  REQUIRE(choice);
  CHECK(choice->guards.size() == 2);
  CHECK(choice->guards[0] == Guard::count("upd", {"T", "D"}, Comparator::Less, 1));
  CHECK(choice->guards[1] == Guard::negate(Guard::count("upd", {"T", "D"}, Comparator::Less, 1)));
}

TEST_CASE("explicit control points") {
  auto g = parse_choreography("A -> B : m @cp 7; B -> A : n @cp 3");
  CHECK(control_points(g) == std::vector<ControlPoint>{7, 3});
  CHECK_THROWS_AS(parse_choreography("A -> B : m @cp 7; B -> A : n"), ParseError);
}

TEST_CASE("parse errors carry positions") {
  try {
    parse_choreography("A -> B : m;\n  B -> : n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 2);
    CHECK(e.column == 8);
  }
  CHECK_THROWS_AS(parse_choreography("choice { { A -> B : m } unless tt }"), ParseError);
  CHECK_THROWS_AS(parse_choreography("par { A -> B : m }"), ParseError);
  CHECK_THROWS_AS(parse_choreography("A -> B : m extra"), ParseError);
}

TEST_CASE("pretty printing parses back") {
  for (const char* f : {"travel.rchor", "fork.rchor", "ping_loop.rchor", "both_true.rchor", "duplicate_cp.rchor"}) {
    CAPTURE(f);
    auto g = test::load(f);
    CHECK(parse_choreography(pretty_print(g)) == g);
  }
}

TEST_CASE("validate: travel agency and the two counterexamples") {
  CHECK(validate(test::load("travel.rchor")).ok());

  auto dup = validate(test::load("duplicate_cp.rchor"));
  CHECK(dup.count(Violation::Kind::DuplicateControlPoint) == 1);
  CHECK(dup.violations.size() == 1);

  auto outside = validate(test::load("controller_outside.rchor"));
  CHECK(outside.count(Violation::Kind::LoopControllerNotInBody) == 1);
  CHECK(outside.violations.size() == 1);

  auto self = validate(parse_choreography("A -> A : m"));
  CHECK(self.count(Violation::Kind::SelfInteraction) == 1);
}

TEST_CASE("event_of maps interactions to sends and constructs to gates") {
  auto g = test::load("travel.rchor");
  auto e = event_of(4, g);
  REQUIRE(std::holds_alternative<Event>(e));
  CHECK(to_string(std::get<Event>(e)) == "T\xC2\xB7" "B!4flight");
  CHECK(std::holds_alternative<GateMarker>(event_of(2, g)));
  CHECK_THROWS_AS(event_of(42, g), std::out_of_range);
}

TEST_CASE("strip_guards and rename keep the structure") {
  auto g = test::load("travel.rchor");
  auto s = strip_guards(g);
  CHECK(find_node(s, 2)->guards[0] == Guard::tt());
  CHECK(control_points(s) == control_points(g));
  auto r = rename_control_points(g, [](ControlPoint cp) { return cp * 10; });
  CHECK(control_points(r).front() == 10);
  CHECK(find_node(r, 100)->message == "upd");
}

namespace {

Guard random_guard(std::mt19937& rng, int depth) {
  const Channel chans[] = {{"A", "B"}, {"B", "A"}};
  const Message msgs[] = {"m", "n"};
  std::uniform_int_distribution<int> pick(0, depth > 0 ? 6 : 3);
  switch (pick(rng)) {
    case 0: return Guard::tt();
    case 1: return Guard::ff();
    case 2: return Guard::count(msgs[rng() % 2], chans[rng() % 2], static_cast<Comparator>(rng() % 5), rng() % 3);
    case 3: return Guard::member(msgs[rng() % 2], chans[rng() % 2]);
    case 4: return Guard::negate(random_guard(rng, depth - 1));
    case 5: return Guard::disj(random_guard(rng, depth - 1), random_guard(rng, depth - 1));
    default: return Guard::conj(random_guard(rng, depth - 1), random_guard(rng, depth - 1));
  }
}

bool core_only(const Guard& g) {
  if (g.kind == Guard::Kind::True || g.kind == Guard::Kind::False || g.kind == Guard::Kind::And) return false;
  for (const auto& o : g.operands) {
    if (!core_only(o)) return false;
  }
  return true;
}

Channels random_channels(std::mt19937& rng) {
  Channels chi;
  int ts = 0;
  for (const Channel& c : {Channel{"A", "B"}, Channel{"B", "A"}}) {
    auto& st = chi[c];
    const int n = static_cast<int>(rng() % 4);
    for (int i = 0; i < n; ++i) {
      Log l{rng() % 2 ? "m" : "n", StateId{0}, 1, ++ts, 0, std::nullopt};
      (rng() % 2 ? st.consumed : st.pending).push_back(l);
    }
  }
  return chi;
}

}  // namespace

TEST_CASE("guard desugaring reaches the core and keeps the meaning") {
  std::mt19937 rng(11);
  for (int i = 0; i < 500; ++i) {
    Guard g = random_guard(rng, 3);
    Guard d = desugar(g);
    CAPTURE(to_string(g));
    CHECK(core_only(d));
    CHECK(desugar(d) == d);
    for (int k = 0; k < 5; ++k) {
      Channels chi = random_channels(rng);
      CHECK(eval_guard(d, chi) == eval_guard(g, chi));
    }
  }
}

TEST_CASE("guards print and parse back") {
  std::mt19937 rng(5);
  for (int i = 0; i < 300; ++i) {
    Guard g = random_guard(rng, 3);
    CAPTURE(to_string(g));
    auto text = "choice { { A -> B : x } unless " + to_string(g) + " + { A -> B : y } unless tt }";
    auto parsed = parse_choreography(text);
    CHECK(parsed.guards[0] == g);
  }
}

TEST_CASE("guard channels") {
  auto g = Guard::disj(Guard::count("a", {"T", "D"}, Comparator::Less, 1), Guard::member("b", {"B", "T"}));
  CHECK(g.channels() == std::vector<Channel>{{"T", "D"}, {"B", "T"}});
  CHECK(Guard::tt().channels().empty());
}
