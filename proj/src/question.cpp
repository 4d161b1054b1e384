#include "hdpref/question.hpp"

#include <algorithm>
#include <unordered_set>

namespace hdpref {

namespace {

std::vector<Index> draw_distinct(Index n, Index s, Rng& rng) {
  // Floyd's algorithm keeps the draw O(s) regardless of n.
  std::vector<Index> out;
  std::unordered_set<Index> seen;
  for (Index j = n - s; j < n; ++j) {
    std::uniform_int_distribution<Index> pick(0, j);
    const Index t = pick(rng);
    const Index v = seen.count(t) ? j : t;
    seen.insert(v);
    out.push_back(v);
  }
  return out;
}

bool has_duplicate_projection(const Dataset& X, const DimensionSet& shown, const std::vector<Index>& rows) {
  for (std::size_t a = 0; a < rows.size(); ++a) {
    for (std::size_t b = a + 1; b < rows.size(); ++b) {
      bool same = true;
      for (Index j : shown) {
        if (X(rows[a], j) != X(rows[b], j)) {
          same = false;
          break;
        }
      }
      if (same) return true;
    }
  }
  return false;
}

}  // namespace

std::vector<Index> sample_tuples(const Dataset& X, const DimensionSet& shown, Index s, Rng& rng,
                                 int max_attempts) {
  const Index count = std::min(s, X.size());
  std::vector<Index> rows = draw_distinct(X.size(), count, rng);
  for (int attempt = 1; attempt < max_attempts && has_duplicate_projection(X, shown, rows); ++attempt) {
    rows = draw_distinct(X.size(), count, rng);
  }
  return rows;
}

RowMatrix displayed_tuples(const Dataset& X, const Question& q) {
  RowMatrix out(static_cast<Index>(q.rows.size()), X.dims());
  for (std::size_t i = 0; i < q.rows.size(); ++i) out.row(static_cast<Index>(i)) = X.row(q.rows[i]);
  return out;
}

}  // namespace hdpref
