#ifndef HDPREF_TESTS_SUPPORT_HPP
#define HDPREF_TESTS_SUPPORT_HPP

// Fixtures and brute-force oracles shared by the test binaries. Nothing here
// calls into the code under test except for the Dataset container.

#include "hdpref/dataset.hpp"
#include "hdpref/preference.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace hdpref::testing {

/// The five houses of the running example (price, bedrooms, ..., condition).
inline RowMatrix houses() {
  RowMatrix X(5, 5);
  X << 0.84, 0.61, 0.93, 0.70, 0.31,  //
      0.59, 0.95, 0.77, 0.86, 0.79,   //
      0.69, 0.84, 1.00, 0.99, 0.55,   //
      1.00, 0.64, 0.68, 0.45, 1.00,   //
      0.74, 1.00, 0.44, 1.00, 0.73;
  return X;
}

inline Vector house_truth() {
  Vector u(5);
  u << 0.40, 0.35, 0.25, 0.0, 0.0;
  return u;
}

inline bool dominates(const RowMatrix& X, Index q, Index p) {
  bool strictly = false;
  for (Index j = 0; j < X.cols(); ++j) {
    if (X(q, j) < X(p, j)) return false;
    if (X(q, j) > X(p, j)) strictly = true;
  }
  return strictly;
}

/// O(n²) dominance filter.
inline std::vector<Index> brute_skyline(const RowMatrix& X) {
  std::vector<Index> out;
  for (Index p = 0; p < X.rows(); ++p) {
    bool dominated = false;
    for (Index q = 0; q < X.rows() && !dominated; ++q) dominated = q != p && dominates(X, q, p);
    if (!dominated) out.push_back(p);
  }
  return out;
}

/// Uniform point on the probability simplex.
inline Vector simplex_sample(Index d, std::mt19937_64& rng) {
  std::exponential_distribution<double> expo(1.0);
  Vector u(d);
  for (Index i = 0; i < d; ++i) u(i) = expo(rng);
  return u / u.sum();
}

inline double plain_regret(const RowMatrix& X, const std::vector<Index>& S, const Vector& u) {
  const Vector scores = X * u;
  double best_s = 0.0;
  for (Index r : S) best_s = std::max(best_s, scores(r));
  return 1.0 - best_s / scores.maxCoeff();
}

/// Largest regret ratio seen over `samples` simplex utilities, plus the
/// basis vectors (where the supremum often sits). A lower bound on the truth.
inline double sampled_max_regret(const RowMatrix& X, const std::vector<Index>& S, int samples,
                                 std::mt19937_64& rng) {
  double worst = 0.0;
  for (Index i = 0; i < X.cols(); ++i) worst = std::max(worst, plain_regret(X, S, Vector::Unit(X.cols(), i)));
  for (int k = 0; k < samples; ++k) worst = std::max(worst, plain_regret(X, S, simplex_sample(X.cols(), rng)));
  return worst;
}

inline double binomial(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  double r = 1.0;
  for (Index i = 1; i <= k; ++i) r = r * static_cast<double>(n - k + i) / static_cast<double>(i);
  return r;
}

/// Counts w-subsets of {0..c-1} holding all of {0..d-1} by walking every subset.
inline double enumerated_coverage(Index c, Index d, Index w) {
  std::vector<bool> pick(static_cast<std::size_t>(c), false);
  std::fill(pick.begin(), pick.begin() + w, true);
  double hits = 0.0, total = 0.0;
  do {
    total += 1.0;
    bool all = true;
    for (Index i = 0; i < d; ++i) all = all && pick[static_cast<std::size_t>(i)];
    if (all) hits += 1.0;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return hits / total;
}

/// Rows that are the unique-or-tied argmax for some utility on a simplex grid
/// of the given resolution (steps per unit).
inline std::vector<Index> grid_candidates(const RowMatrix& X, int steps) {
  std::vector<char> hit(static_cast<std::size_t>(X.rows()), 0);
  const Index d = X.cols();
  std::vector<int> c(static_cast<std::size_t>(d), 0);
  // Enumerate compositions of `steps` into d parts.
  auto visit = [&](auto&& self, Index i, int left) -> void {
    if (i == d - 1) {
      c[static_cast<std::size_t>(i)] = left;
      Vector u(d);
      for (Index j = 0; j < d; ++j) u(j) = c[static_cast<std::size_t>(j)] / static_cast<double>(steps);
      const Vector scores = X * u;
      const double best = scores.maxCoeff();
      for (Index r = 0; r < X.rows(); ++r) {
        if (scores(r) >= best - 1e-12) hit[static_cast<std::size_t>(r)] = 1;
      }
      return;
    }
    for (int v = 0; v <= left; ++v) {
      c[static_cast<std::size_t>(i)] = v;
      self(self, i + 1, left - v);
    }
  };
  visit(visit, 0, steps);
  std::vector<Index> out;
  for (Index r = 0; r < X.rows(); ++r) {
    if (hit[static_cast<std::size_t>(r)]) out.push_back(r);
  }
  return out;
}

inline RowMatrix uniform_points(Index n, Index d, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RowMatrix X(n, d);
  for (Index i = 0; i < n; ++i) {
    for (Index j = 0; j < d; ++j) X(i, j) = 1.0 - unit(rng);
  }
  for (Index j = 0; j < d; ++j) X.col(j) /= X.col(j).maxCoeff();
  return X;
}

inline Dataset random_dataset(Index n, Index d, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return Dataset(uniform_points(n, d, rng));
}

}  // namespace hdpref::testing

#endif  // HDPREF_TESTS_SUPPORT_HPP
