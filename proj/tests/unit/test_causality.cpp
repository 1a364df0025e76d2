#include <doctest.h>

#include "../support.hpp"
#include "chorrev/causality.hpp"
#include "chorrev/explorer.hpp"
#include "chorrev/projection.hpp"

using namespace chorrev;

TEST_CASE("loops and membership") {
  auto g = test::load("travel.rchor");
  auto ls = loops(g);
  REQUIRE(ls.size() == 1);
  CHECK(ls[0].cp == 1);
  CHECK(ls[0].controller == "T");
  CHECK(ls[0].body == std::set<ControlPoint>{2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(log_in_loop(Log{"upd", {}, 10, 1, 1, {}}, ls[0]));
  CHECK(log_in_loop(Log{kStartLoop, {}, 1, 1, 1, {}}, ls[0]));
  CHECK(loops(test::load("single.rchor")).empty());
}

TEST_CASE("context rejects undefined orders") {
  CHECK_THROWS_AS(CausalContext(parse_choreography("A -> B : m; C -> D : n")), std::invalid_argument);
}

TEST_CASE("travel rollback: rounds and rollback points") {
  Session s(test::load("travel.rchor"));
  test::run_schedule(s, "travel_rollback.json", true);
  const auto& chi = s.config().channels;
  const LoopRef& L = s.context().loop_refs().at(0);

  CHECK(log_round({{"T", "D"}, 1}, L, chi) == 0);
  CHECK(log_round({{"T", "D"}, 4}, L, chi) == 0);
  CHECK(log_round({{"T", "D"}, 5}, L, chi) == 1);
  CHECK(log_round({{"T", "B"}, 3}, L, chi) == 0);
  CHECK(log_round({{"T", "B"}, 6}, L, chi) == 1);
  // B sent fullPrice after its first start-loop message
  CHECK(log_round({{"B", "T"}, 1}, L, chi) == 0);
  CHECK(ongoing(L, chi));

  CausalGraph graph(chi, s.context());
  CHECK(graph.antisymmetry_violations().empty());
  // dest ⊑ fullPrice ⊑ upd ⊑ next start-loop messages
  CHECK(graph.precedes({{"T", "B"}, 3}, {{"B", "T"}, 1}));
  CHECK(graph.precedes({{"B", "T"}, 1}, {{"T", "D"}, 4}));
  CHECK(graph.precedes({{"T", "D"}, 4}, {{"T", "D"}, 5}));
  CHECK(graph.precedes({{"T", "B"}, 3}, {{"T", "B"}, 6}));
  CHECK_FALSE(graph.precedes({{"T", "D"}, 4}, {{"T", "B"}, 3}));
  CHECK(graph.effects({{"T", "B"}, 3}).size() == 5);

  auto rbp = rollback_points(chi, s.context(), {"T", "B"});
  CHECK(std::find(rbp.begin(), rbp.end(), LogRef{{"T", "B"}, 3}) != rbp.end());
}

namespace {

// Independent oracle for the ping loop (A controls, body A->B:m; B->A:n):
// on A->B the round of a log is the number of start-loop logs up to it minus
// one; B sends exactly one n per round, so the k-th n is in round k.
std::set<std::pair<LogRef, LogRef>> oracle_base(const Channels& chi) {
  struct Info {
    LogRef ref;
    Message m;
    int round;
  };
  std::vector<Info> ab, ba;
  int starts = 0;
  auto it = chi.find({"A", "B"});
  if (it != chi.end()) {
    for (const auto& l : it->second.all()) {
      if (l.message == kStartLoop) ++starts;
      ab.push_back({{{"A", "B"}, l.timestamp}, l.message, starts - 1});
    }
  }
  it = chi.find({"B", "A"});
  if (it != chi.end()) {
    int k = 0;
    for (const auto& l : it->second.all()) ba.push_back({{{"B", "A"}, l.timestamp}, l.message, k++});
  }
  std::set<std::pair<LogRef, LogRef>> out;
  for (const auto* side : {&ab, &ba}) {
    for (std::size_t i = 0; i < side->size(); ++i) {
      for (std::size_t j = i + 1; j < side->size(); ++j) out.insert({(*side)[i].ref, (*side)[j].ref});
    }
  }
  // statically †, m ≤ n and never the reverse; ‡ closes the body so n ≤ ‡
  for (const auto& x : ab) {
    for (const auto& y : ba) {
      if (x.m == kEndLoop) {
        out.insert({y.ref, x.ref});
        continue;
      }
      if (x.round <= y.round) {
        out.insert({x.ref, y.ref});
      } else {
        out.insert({y.ref, x.ref});
      }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("round rule matches the brute-force oracle on the ping loop") {
  auto g = test::load("ping_loop.rchor");
  System s = project_system(g);
  CausalContext ctx(g);
  ExploreOptions opts;
  opts.bound = {60, 3};
  auto reach = reachable(s, &ctx, opts);
  CHECK_FALSE(reach.truncated);
  std::size_t inverted = 0;
  for (const auto& cfg : reach.configs) {
    CausalGraph graph(cfg.channels, ctx);
    std::set<std::pair<LogRef, LogRef>> base;
    for (const auto& e : graph.base_edges()) base.insert(e);
    CHECK(base == oracle_base(cfg.channels));
    for (const auto& [a, b] : base) {
      if (a.channel == Channel{"B", "A"} && b.channel == Channel{"A", "B"}) {
        const Log* m = find_log(cfg.channels, b);
        if (m->message == "m") ++inverted;
      }
    }
  }
  // n of an earlier round before m of a later one, against the static order
  CHECK(inverted > 0);
}

TEST_CASE("two-iteration ping loop, hand-computed") {
  Session s(test::load("ping_loop.rchor"));
  std::mt19937_64 rng(0);
  auto step = [&](Directive::Kind k, const char* who, const char* msg) {
    Directive d;
    d.kind = k;
    d.participant = who;
    d.message = msg;
    REQUIRE(s.apply(d, rng));
  };
  using K = Directive::Kind;
  for (int round = 0; round < 2; ++round) {
    step(K::Out, "A", kStartLoop.c_str());
    step(K::Inp, "B", kStartLoop.c_str());
    step(K::Out, "A", "m");
    step(K::Inp, "B", "m");
    step(K::Out, "B", "n");
    step(K::Inp, "A", "n");
  }
  // A->B: † 1, m 2, † 3, m 4 ; B->A: n 1, n 2
  const auto& chi = s.config().channels;
  CausalGraph graph(chi, s.context());
  const LogRef m0{{"A", "B"}, 2}, m1{{"A", "B"}, 4}, n0{{"B", "A"}, 1}, n1{{"B", "A"}, 2};
  CHECK(graph.precedes(m0, n0));
  CHECK(graph.precedes(n0, m1));  // earlier-round n before later-round m
  CHECK(graph.precedes(m1, n1));
  CHECK_FALSE(graph.precedes(m1, n0));
  CHECK(graph.antisymmetry_violations().empty());
}
