#include <doctest.h>

#include "../support.hpp"
#include "chorrev/projection.hpp"
#include "chorrev/runtime.hpp"

using namespace chorrev;

namespace {

Log log_of(Message m, int ts, bool consumed = false) {
  Log l{std::move(m), StateId{0}, 1, ts, ts, std::nullopt};
  if (consumed) l.receipt = Receipt{StateId{0}, 1};
  return l;
}

}  // namespace

TEST_CASE("guard evaluation over split channels") {
  Channels chi;
  chi[{"T", "D"}].consumed = {log_of("upd", 1, true)};
  chi[{"T", "D"}].pending = {log_of("upd", 2), log_of("x", 3)};
  const Channel td{"T", "D"};
  CHECK(eval_guard(Guard::count("upd", td, Comparator::Equal, 2), chi));
  CHECK(eval_guard(Guard::count("upd", td, Comparator::Equal, 1), chi, GuardScope::PendingOnly));
  CHECK(eval_guard(Guard::member("x", td), chi));
  CHECK_FALSE(eval_guard(Guard::member("y", td), chi));
  CHECK_FALSE(eval_guard(Guard::member("upd", {"D", "T"}), chi));
  CHECK(eval_guard(Guard::tt(), chi));
  CHECK_FALSE(eval_guard(Guard::ff(), chi));
  CHECK(eval_guard(Guard::conj(Guard::member("x", td), Guard::negate(Guard::member("y", td))), chi));
}

TEST_CASE("branch book updates") {
  const Event e{{"A", "B"}, Polarity::Send, 1, "x"};
  const Decoration on = Decoration::ongoing(StateId{3}, e, Guard::tt());
  const Decoration done = Decoration::committed(StateId{3}, e, Guard::tt());
  BranchBook book;
  CHECK(decoration_valid(on, book));
  CHECK(decoration_valid(Decoration::unit(), book));
  BookEntry ex;
  ex.exhausted = true;
  book.set(StateId{3}, ex);
  CHECK(upd_inp(done, book).at(StateId{3}) == BookEntry{});
  CHECK(upd_inp(on, book) == book);
  CHECK(book.at(StateId{4}) == BookEntry{});
}

TEST_CASE("forward steps on a single interaction") {
  System s = project_system(test::load("single.rchor"));
  Configuration c0 = initial_configuration(s);
  CHECK(c0.channels.size() == 2);
  auto steps = enabled_forward(c0, s);
  REQUIRE(steps.size() == 1);
  CHECK(steps[0].kind == ForwardStep::Kind::Out);
  CHECK(steps[0].participant == "A");

  Configuration c1 = apply_forward(c0, s, steps[0]);
  const auto& ab = c1.channels.at({"A", "B"});
  REQUIRE(ab.pending.size() == 1);
  CHECK(ab.pending[0].message == "m");
  CHECK(ab.pending[0].timestamp == 1);
  CHECK(ab.pending[0].sender_state == s.at("A").initial());
  CHECK(next_timestamp(c1.channels, "A") == 2);

  auto in = enabled_forward(c1, s);
  REQUIRE(in.size() == 1);
  CHECK(in[0].kind == ForwardStep::Kind::Inp);
  Configuration c2 = apply_forward(c1, s, in[0]);
  const auto& ab2 = c2.channels.at({"A", "B"});
  CHECK(ab2.pending.empty());
  REQUIRE(ab2.consumed.size() == 1);
  REQUIRE(ab2.consumed[0].receipt);
  CHECK(ab2.consumed[0].receipt->receiver_state == s.at("B").initial());
  CHECK(enabled_forward(c2, s).empty());
  CHECK_THROWS(apply_forward(c2, s, in[0]));

  auto plain = forget_config(c2);
  CHECK(canonical(plain) == canonical(forget_config(c2)));
  CHECK(canonical(c1) != canonical(c2));
}

TEST_CASE("timestamps count per sender") {
  auto g = test::load("travel.rchor");
  System s = project_system(g);
  Configuration c = initial_configuration(s);
  for (int i = 0; i < 3; ++i) {
    auto steps = enabled_forward(c, s);
    auto it = std::find_if(steps.begin(), steps.end(), [](const ForwardStep& st) {
      return st.kind == ForwardStep::Kind::Out && st.participant == "T";
    });
    REQUIRE(it != steps.end());
    c = apply_forward(c, s, *it);
  }
  std::set<int> ts;
  for (const auto& [ch, st] : c.channels) {
    for (const auto& l : st.all()) {
      if (ch.sender == "T") ts.insert(l.timestamp);
    }
  }
  CHECK(ts == std::set<int>{1, 2, 3});
}

TEST_CASE("guards block branch entry when false") {
  auto g = test::load("guard_free.rchor");
  System s = project_system(g);
  Configuration c = initial_configuration(s);
  // ff guards never block forward execution
  CHECK(enabled_forward(c, s).size() == 2);
  RuntimeOptions blocking;
  blocking.block_on_guard = true;
  auto bt = project_system(test::load("both_true.rchor"));
  CHECK(enabled_forward(initial_configuration(bt), bt, blocking).empty());
  CHECK(enabled_forward(initial_configuration(bt), bt).size() == 2);
}
