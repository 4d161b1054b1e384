#include "hdpref/preference.hpp"

#include "support.hpp"

#include <doctest.h>

#include <set>

using namespace hdpref;
using namespace hdpref::testing;

TEST_CASE("utilities of the house example") {
  const RowMatrix X = houses();
  const UtilityVector u(house_truth());
  const double expected[] = {0.782, 0.761, 0.820, 0.794, 0.756};
  for (Index i = 0; i < 5; ++i) CHECK(utility(u, X.row(i)) == doctest::Approx(expected[i]).epsilon(1e-9));
  CHECK(utility(Vector::Unit(5, 2), X.row(0)) == 0.93);
  CHECK_THROWS(utility(Vector::Ones(4), X.row(0)));
}

TEST_CASE("partial utilities on a displayed subset") {
  const RowMatrix X = houses();
  const UtilityVector u(house_truth());
  const DimensionSet shown({0, 1, 3});
  const double expected[] = {0.550, 0.569, 0.570, 0.624, 0.646};
  for (Index i = 0; i < 5; ++i) CHECK(partial_utility(u, shown, X.row(i)) == doctest::Approx(expected[i]).epsilon(1e-3));
  for (Index i = 0; i < 5; ++i) {
    CHECK(partial_utility(u, DimensionSet({3, 4}), X.row(i)) == 0.0);
    CHECK(partial_utility(u, DimensionSet::all(5), X.row(i)) == doctest::Approx(utility(u, X.row(i))));
  }
}

TEST_CASE("regret ratio of the house example") {
  const Dataset X(houses());
  const UtilityVector u(house_truth());
  const std::vector<Index> S{0, 1};
  CHECK(regret_ratio(X, S, u) == doctest::Approx(1.0 - 0.782 / 0.820).epsilon(1e-9));
  CHECK(regret_ratio(X, S, u) * 100 == doctest::Approx(4.63).epsilon(0.01 / 4.63));
  const std::vector<Index> all{0, 1, 2, 3, 4};
  CHECK(regret_ratio(X, all, u) == 0.0);
  const std::vector<Index> best{2};
  CHECK(regret_ratio(X, best, u) == 0.0);
}

TEST_CASE("regret ratio is scale invariant and monotone in the set") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const RowMatrix X = uniform_points(40, 4, rng);
    const Vector u = simplex_sample(4, rng);
    std::vector<Index> S{static_cast<Index>(rng() % 40)};
    std::vector<Index> bigger = S;
    bigger.push_back(static_cast<Index>(rng() % 40));
    // Power-of-two scaling is exact in floating point, so equality is exact too.
    CHECK(regret_ratio(X, S, u) == regret_ratio(X, S, Vector(u * 4.0)));
    CHECK(regret_ratio(X, S, u) == doctest::Approx(regret_ratio(X, S, Vector(u * 3.5))).epsilon(1e-14));
    CHECK(regret_ratio(X, bigger, u) <= regret_ratio(X, S, u));
  }
}

TEST_CASE("max regret ratio trivial cases") {
  const RowMatrix X = houses();
  const std::vector<Index> all{0, 1, 2, 3, 4};
  CHECK(max_regret_ratio(X, all) == 0.0);
  const RowMatrix D1 = X.col(0);
  const std::vector<Index> p4{3};
  CHECK(max_regret_ratio(D1, p4) == doctest::Approx(0.0));
}

TEST_CASE("max regret ratio of a single house against sampled utilities") {
  const RowMatrix X = houses();
  const std::vector<Index> p4{3};
  std::mt19937_64 rng(9);
  const double sampled = sampled_max_regret(X, p4, 100000, rng);
  const double exact = max_regret_ratio(X, p4);
  CHECK(sampled <= exact + 1e-9);
  CHECK(exact <= sampled + 0.01);
}

TEST_CASE("max regret ratio is sandwiched by sampling on random instances") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 10 + static_cast<Index>(rng() % 41), d = 2 + static_cast<Index>(rng() % 4);
    const RowMatrix X = uniform_points(n, d, rng);
    std::vector<Index> S;
    for (int k = 0; k < 3; ++k) S.push_back(static_cast<Index>(rng() % n));
    const double sampled = sampled_max_regret(X, S, 10000, rng);
    const double exact = max_regret_ratio(X, S);
    CHECK(sampled <= exact + 1e-9);
    CHECK(exact <= sampled + 0.05);
    const auto w = max_regret_witness(X, S);
    CHECK(w.regret == doctest::Approx(exact));
  }
}

TEST_CASE("sparse utilities have the requested support") {
  Rng rng(1);
  const UtilityVector u = gen_sparse_utility(100, 3, rng);
  CHECK(u.support_size() == 3);
  CHECK(u.weights().sum() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK((u.weights().array() >= 0).all());
  const UtilityVector e = gen_sparse_utility(10, 1, rng);
  CHECK(e.weights().maxCoeff() == 1.0);
  CHECK_THROWS(gen_sparse_utility(3, 4, rng));
  CHECK_THROWS(gen_sparse_utility(100, 6, rng));

  Rng a(42), b(42);
  CHECK(gen_sparse_utility(50, 4, a).weights() == gen_sparse_utility(50, 4, b).weights());
}

TEST_CASE("support draws are spread evenly over the dimensions") {
  Rng rng(77);
  const Index d = 20, draws = 4000;
  std::vector<int> hits(d, 0);
  std::set<std::vector<Index>> supports;
  for (Index k = 0; k < draws; ++k) {
    const auto s = gen_sparse_utility(d, 3, rng).support();
    supports.insert(s.indices());
    for (Index j : s) ++hits[static_cast<std::size_t>(j)];
  }
  // Each dimension is in the support with probability 3/20.
  const double p = 3.0 / d, mean = draws * p, sd = std::sqrt(draws * p * (1 - p));
  for (int h : hits) CHECK(std::abs(h - mean) < 4.5 * sd);
  CHECK(supports.size() > 500);
}

TEST_CASE("simulated user answers by partial utility") {
  const RowMatrix X = houses();
  const SimulatedUser user{UtilityVector(house_truth())};
  const Answer a = user.answer(DimensionSet({0, 1, 3}), X);
  CHECK(a == Answer::choose(4));
  CHECK(user.answer(DimensionSet({3, 4}), X) == Answer::opt_out());

  RowMatrix twins(2, 5);
  twins.row(0) = X.row(2);
  twins.row(1) = X.row(2);
  CHECK(simulate_answer(user, DimensionSet::all(5), twins) == Answer::choose(0));
}

TEST_CASE("opt-out happens exactly when no key attribute is shown") {
  std::mt19937_64 gen(8);
  Rng rng(8);
  for (int trial = 0; trial < 300; ++trial) {
    const RowMatrix X = uniform_points(3, 12, gen);
    const SimulatedUser user{gen_sparse_utility(12, 1 + static_cast<Index>(trial % 4), rng)};
    std::vector<Index> dims;
    for (Index j = 0; j < 12; ++j) {
      if (gen() % 3 == 0) dims.push_back(j);
    }
    const DimensionSet shown(dims);
    bool any_key = false;
    for (Index j : shown) any_key = any_key || user.truth[j] > 0;
    CHECK((user.answer(shown, X).kind == Answer::Kind::opt_out) == !any_key);
  }
}

TEST_CASE("answer kinds round-trip through their names") {
  for (auto k : {Answer::Kind::choice, Answer::Kind::opt_out, Answer::Kind::quit}) {
    CHECK(answer_kind_from_string(to_string(k)) == k);
  }
  CHECK_THROWS(answer_kind_from_string("maybe"));
}
