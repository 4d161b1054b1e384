#include "hdpref/phase1.hpp"

#include "support.hpp"

#include <doctest.h>

using namespace hdpref;
using namespace hdpref::testing;

namespace {


std::vector<Index> sizes(const std::vector<DimensionSet>& blocks) {
  std::vector<Index> out;
  for (const auto& b : blocks) out.push_back(b.size());
  return out;
}

}  // namespace

TEST_CASE("blocks partition the attributes in order") {
  const auto b = make_blocks(100, 7);
  CHECK(b.size() == 15);
  CHECK(b.back().indices() == std::vector<Index>{98, 99});
  CHECK(b[3].indices() == std::vector<Index>{21, 22, 23, 24, 25, 26, 27});
  CHECK(make_blocks(7, 7).size() == 1);
  CHECK(sizes(make_blocks(10, 3)) == std::vector<Index>{3, 3, 3, 1});
  CHECK_THROWS(make_blocks(10, 0));
}

TEST_CASE("first question shows block zero with distinct tuples") {
  const Dataset X = random_dataset(200, 100, 1);
  Phase1State st(100, 7);
  Rng rng(1);
  const Question q = st.next_question(X, 2, rng);
  CHECK(q.shown.indices() == std::vector<Index>{0, 1, 2, 3, 4, 5, 6});
  CHECK(q.probe == q.shown);
  REQUIRE(q.rows.size() == 2);
  CHECK(q.rows[0] != q.rows[1]);
}

TEST_CASE("short last block is padded with eliminated attributes") {
  const Dataset X = random_dataset(50, 100, 2);
  Phase1State st(100, 7);
  Rng rng(2);
  for (int b = 0; b < 14; ++b) st.apply(b == 4 ? Answer::choose(0) : Answer::opt_out());
  const Question q = st.next_question(X, 2, rng);
  CHECK(q.probe.indices() == std::vector<Index>{98, 99});
  CHECK(q.shown.size() == 7);
  // Lowest eliminated dimensions first.
  CHECK(q.shown.indices() == std::vector<Index>{98, 99, 0, 1, 2, 3, 4});
}

TEST_CASE("a short block with nothing eliminated is shown as is") {
  const Dataset X = random_dataset(30, 6, 3);
  Phase1State st(6, 7);
  Rng rng(3);
  CHECK(st.next_question(X, 2, rng).shown.size() == 6);
}

TEST_CASE("apply keeps or eliminates whole blocks and never touches padding") {
  Phase1State st(20, 7);
  st.apply(Answer::opt_out());
  CHECK(st.eliminated().size() == 7);
  st.apply(Answer::choose(1));
  CHECK(st.kept().indices() == std::vector<Index>{7, 8, 9, 10, 11, 12, 13});
  CHECK_THROWS(st.apply(Answer::quit()));
  st.apply(Answer::opt_out());
  CHECK(st.done());
  CHECK(st.eliminated().size() == 13);
}

TEST_CASE("hand-simulated run over a known support") {
  const Dataset X = random_dataset(300, 100, 4);
  Vector w = Vector::Zero(100);
  w(3) = 0.5;
  w(40) = 0.3;
  w(77) = 0.2;
  const SimulatedUser user{UtilityVector(w)};
  Phase1State st(100, 7);
  Rng rng(4);
  int questions = 0;
  while (!st.done()) {
    const Question q = st.next_question(X, 2, rng);
    st.apply(user.answer(q.shown, displayed_tuples(X, q)));
    ++questions;
  }
  CHECK(questions == 15);
  std::vector<Index> expected;
  for (Index b : {0, 5, 11}) {
    for (Index j = 0; j < 7; ++j) expected.push_back(7 * b + j);
  }
  CHECK(st.kept().indices() == expected);
}

TEST_CASE("phase one is exact and keeps at most d_int blocks") {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    const Index d = 10 + static_cast<Index>(rng() % 200);
    const Dataset X = random_dataset(40, d, rng());
    const Index d_int = 1 + static_cast<Index>(rng() % 5);
    const SimulatedUser user{gen_sparse_utility(d, d_int, rng)};
    Phase1State st(d, 7);
    Index asked = 0;
    while (!st.done()) {
      const Question q = st.next_question(X, 2, rng);
      CHECK(q.shown.size() <= 7);
      st.apply(user.answer(q.shown, displayed_tuples(X, q)));
      ++asked;
    }
    CHECK(asked == (d + 6) / 7);
    CHECK(st.kept().size() <= d_int * 7);
    for (Index j : user.truth.support()) CHECK(st.kept().contains(j));
    for (Index j : st.eliminated()) CHECK(user.truth[j] == 0.0);
  }
}
