#ifndef HDPREF_POLYTOPE_SEARCH_HPP
#define HDPREF_POLYTOPE_SEARCH_HPP

// Final search on the identified key attributes. The admissible utilities
// form a polytope {u >= 0, Σu = 1, u·h > 0}; every pairwise answer adds a
// halfspace and the candidate tuples are those that are best for some
// admissible utility.

#include "hdpref/question.hpp"

#include <optional>
#include <set>
#include <utility>

namespace hdpref {

/// Numerical slack for strict inequalities and LP feasibility.
inline constexpr double kFeasibilityTol = 1e-9;

struct Halfspace {
  Vector normal;       ///< admissible u satisfy normal·u > 0 (or >= 0 when not strict)
  bool strict = true;
};

class InconsistentAnswers : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class UtilityPolytope {
 public:
  UtilityPolytope() = default;
  explicit UtilityPolytope(Index dim);

  Index dim() const { return dim_; }
  const std::vector<Halfspace>& constraints() const { return constraints_; }
  void add(Vector normal, bool strict = true);

  /// Largest t <= 1 with normal·u >= t on every strict constraint; nullopt
  /// when not even the closure is feasible.
  std::optional<double> margin() const;
  bool empty() const;
  bool contains(const Vector& u) const;

  /// Average of `samples` LP vertices of the polytope shrunk to half its
  /// margin, each maximizing a Gaussian random objective.
  Vector interior_point(Rng& rng, int samples = 50) const;

  /// Hit-and-run walk started at `start`, which must lie in the polytope.
  /// Returns one column per sample.
  Eigen::MatrixXd sample(const Vector& start, Rng& rng, int count, int thin = 2) const;

 private:
  Index dim_ = 0;
  std::vector<Halfspace> constraints_;
};

/// True iff some admissible u makes `p` at least as good as every row of `others`.
bool is_candidate(const Vector& p, const RowMatrix& others, const UtilityPolytope& poly);

/// Halfspaces implied by earlier choices that displayed at least two key
/// attributes. Coordinates follow the order of `keys`; key attributes that
/// were not displayed get a zero coefficient.
std::vector<Halfspace> harvest_constraints(const Dataset& X, const std::vector<AnsweredQuestion>& log,
                                           const DimensionSet& keys);

class PolytopeSearch {
 public:
  PolytopeSearch() = default;
  PolytopeSearch(const Dataset& X, DimensionSet keys, const std::vector<Halfspace>& initial);

  const DimensionSet& keys() const { return keys_; }
  const UtilityPolytope& polytope() const { return poly_; }
  /// Rows of the session dataset that can still be the favorite.
  std::vector<Index> candidates() const;
  Index num_candidates() const { return static_cast<Index>(candidates_.size()); }

  /// No candidate pair is left to ask about.
  bool terminal() const;

  /// Up to `s` distinct candidate rows. The first two are the pair not yet
  /// compared whose hyperplane splits a sample of admissible utilities most
  /// evenly, among the candidates that win most often on that sample.
  std::vector<Index> next_tuples(Rng& rng, Index s = 2);
  std::pair<Index, Index> next_pair(Rng& rng);

  /// Records that `chosen` was preferred to every other row in `shown` and
  /// prunes the candidates. Throws InconsistentAnswers if no utility remains.
  void apply(Index chosen, const std::vector<Index>& shown);
  void apply(Index chosen, Index other) { apply(chosen, std::vector<Index>{chosen, other}); }

  /// Best candidate under a random admissible utility.
  Index result(Rng& rng) const;

 private:
  Vector keyed(Index row) const;
  Index pool_position(Index row) const;
  void prune();

  DimensionSet keys_;
  RowMatrix pool_;               // key-projected skyline, one row per distinct point
  std::vector<Index> pool_rows_;  // matching rows of the session dataset
  std::vector<Index> candidates_;  // positions into pool_
  UtilityPolytope poly_;
  std::set<std::pair<Index, Index>> asked_;
};

}  // namespace hdpref

#endif  // HDPREF_POLYTOPE_SEARCH_HPP
